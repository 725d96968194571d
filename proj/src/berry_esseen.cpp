#include "ensemblekit/berry_esseen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

namespace {

constexpr double kMergeTol = 1e-10;

std::size_t count_le(const std::vector<double>& xs, double x) {
  return static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
}

}  // namespace

double SpectralCDF::operator()(double x) const {
  const std::size_t n = count_le(jump_points, x);
  return std::min(1.0, std::accumulate(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(n), 0.0));
}

double SpectralCDF::left_limit(double x) const {
  const std::size_t n =
      static_cast<std::size_t>(std::lower_bound(jump_points.begin(), jump_points.end(), x) - jump_points.begin());
  return std::min(1.0, std::accumulate(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(n), 0.0));
}

SpectralCDF spectral_cdf(const std::vector<double>& energies, const std::vector<double>& weights) {
  if (energies.size() != weights.size() || energies.empty())
    throw PreconditionError("spectral_cdf: energies and weights must be nonempty and of equal length");
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });

  double total = 0.0;
  for (double w : weights) total += std::max(0.0, w);
  if (!(total > 0.0)) throw PreconditionError("spectral_cdf: weights sum to zero");
  const double norm = std::abs(total - 1.0) > kMergeTol ? total : 1.0;

  SpectralCDF cdf;
  for (std::size_t i : order) {
    const double w = std::max(0.0, weights[i]) / norm;
    if (!cdf.jump_points.empty() && energies[i] - cdf.jump_points.back() <= kMergeTol) {
      cdf.masses.back() += w;
    } else {
      cdf.jump_points.push_back(energies[i]);
      cdf.masses.push_back(w);
    }
  }
  for (std::size_t i : order) cdf.mu += std::max(0.0, weights[i]) / norm * energies[i];
  for (std::size_t i : order) {
    const double dev = energies[i] - cdf.mu;
    cdf.sigma2 += std::max(0.0, weights[i]) / norm * dev * dev;
  }
  return cdf;
}

SpectralCDF spectral_cdf(const GlobalState& rho, const SpectralDecomposition& spec) {
  if (rho.dim() != spec.dim()) throw PreconditionError("spectral_cdf: state and spectrum dimensions differ");
  const linalg::RealVector pop = rho.populations(spec);
  return spectral_cdf(std::vector<double>(spec.energies.data(), spec.energies.data() + spec.energies.size()),
                      std::vector<double>(pop.data(), pop.data() + pop.size()));
}

SpectralCDF spectral_cdf(const DensityMatrix& rho, const SpectralDecomposition& spec) {
  return spectral_cdf(GlobalState::dense(rho), spec);
}

double gaussian_cdf(double x, double mu, double sigma2) {
  return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * sigma2));
}

double kolmogorov_distance(const SpectralCDF& cdf) {
  if (!(cdf.sigma2 > 0.0)) throw DegenerateSpectrum("kolmogorov_distance: energy variance is zero");
  double sup = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < cdf.jump_points.size(); ++i) {
    const double g = gaussian_cdf(cdf.jump_points[i], cdf.mu, cdf.sigma2);
    const double at = std::min(1.0, below + cdf.masses[i]);
    sup = std::max({sup, std::abs(at - g), std::abs(below - g)});
    below = at;
  }
  return sup;
}

BEDelta delta_bound(const BEParams& p) {
  if (!(p.N > 1.0)) throw PreconditionError("delta_bound: needs N > 1");
  if (!(p.sigma2 > 0.0)) throw PreconditionError("delta_bound: needs sigma^2 > 0");
  if (!(p.C_d >= 1.0)) throw PreconditionError("delta_bound: C_d must be >= 1");
  BEDelta out;
  out.C_d = p.C_d;
  out.k = p.k;
  out.xi = p.xi;
  out.z = p.z;
  out.d = p.d;
  out.T = p.T;
  out.N = p.N;
  out.sigma2 = p.sigma2;
  const double log_n = std::log(p.N);
  out.K = std::max(static_cast<double>(p.k), p.xi) * (p.z + 1.0);
  const double log_term = 1.0 / (out.K * log_n);
  const double var_term = p.N / p.sigma2;
  out.branch = log_term > var_term ? "log" : "variance";
  out.value = p.C_d * std::pow(out.K, 2.0 * p.d) / std::sqrt(p.sigma2 / p.N) * std::max(log_term, var_term);
  out.rhs = out.value * std::pow(log_n, 2.0 * p.d) / std::sqrt(p.N);
  return out;
}

}  // namespace ensemblekit
