#include "ensemblekit/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

using linalg::Complex;
using linalg::Matrix;

namespace {

constexpr double kEnvelopeTol = 1e-9;
constexpr double kZGrid = 0.5;

Matrix hermitian_sign(const Matrix& m) {
  return linalg::from_eigen(linalg::eigh(linalg::hermitian_part(m)), [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

// tr_X((P x I) Delta), Delta indexed as (a, b) with a on X.
Matrix contract_x(const Matrix& delta, const Matrix& p, std::size_t dx, std::size_t dy) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dy), static_cast<Eigen::Index>(dy));
  for (std::size_t a = 0; a < dx; ++a)
    for (std::size_t a2 = 0; a2 < dx; ++a2) {
      const Complex pa = p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a2));
      if (pa == Complex(0.0)) continue;
      out += pa * delta.block(static_cast<Eigen::Index>(a2 * dy), static_cast<Eigen::Index>(a * dy),
                              static_cast<Eigen::Index>(dy), static_cast<Eigen::Index>(dy));
    }
  return linalg::hermitian_part(out);
}

// tr_Y((I x Q) Delta).
Matrix contract_y(const Matrix& delta, const Matrix& q, std::size_t dx, std::size_t dy) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dx), static_cast<Eigen::Index>(dx));
  for (std::size_t a = 0; a < dx; ++a)
    for (std::size_t a2 = 0; a2 < dx; ++a2) {
      const auto blk = delta.block(static_cast<Eigen::Index>(a * dy), static_cast<Eigen::Index>(a2 * dy),
                                   static_cast<Eigen::Index>(dy), static_cast<Eigen::Index>(dy));
      // sum_{b,b'} Q[b,b'] Delta[(a,b'),(a2,b)] = tr(Q * blk)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a2)) = (q * blk).trace();
    }
  return linalg::hermitian_part(out);
}

Matrix random_hermitian_sign(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return hermitian_sign(g);
}

}  // namespace

CorrelationEstimate correlation_bracket(const Matrix& delta, std::size_t dx, std::size_t dy,
                                        const CorrelationOptions& options) {
  const auto dim = static_cast<Eigen::Index>(dx * dy);
  if (delta.rows() != dim || delta.cols() != dim) throw PreconditionError("correlation: Delta has wrong dimension");
  CorrelationEstimate est;
  est.delta_trace_norm = linalg::trace_norm_hermitian(delta);
  est.p = Matrix::Identity(static_cast<Eigen::Index>(dx), static_cast<Eigen::Index>(dx));
  est.q = Matrix::Identity(static_cast<Eigen::Index>(dy), static_cast<Eigen::Index>(dy));
  if (est.delta_trace_norm == 0.0) return est;

  // Alternating maximization: for fixed P the best Q is sign(tr_X((P x I) Delta)).
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart + 1));
    Matrix p = random_hermitian_sign(dx, rng);
    Matrix q;
    double value = -1.0;
    for (int it = 0; it < options.max_iterations; ++it) {
      const Matrix mp = contract_x(delta, p, dx, dy);
      q = hermitian_sign(mp);
      const Matrix nq = contract_y(delta, q, dx, dy);
      p = hermitian_sign(nq);
      const double next = linalg::trace_norm_hermitian(nq);
      const bool converged = std::abs(next - value) <= options.tolerance * std::max(next, 1e-300);
      value = next;
      if (converged) break;
    }
    if (value > est.lower) {
      est.lower = value;
      est.p = p;
      est.q = q;
    }
  }

  // Realignment R[(a,a'),(b,b')] = Delta[(a,b),(a',b')].
  Matrix realigned(static_cast<Eigen::Index>(dx * dx), static_cast<Eigen::Index>(dy * dy));
  for (std::size_t a = 0; a < dx; ++a)
    for (std::size_t a2 = 0; a2 < dx; ++a2)
      for (std::size_t b = 0; b < dy; ++b)
        for (std::size_t b2 = 0; b2 < dy; ++b2)
          realigned(static_cast<Eigen::Index>(a * dx + a2), static_cast<Eigen::Index>(b * dy + b2)) =
              delta(static_cast<Eigen::Index>(a * dy + b), static_cast<Eigen::Index>(a2 * dy + b2));
  const double sigma_max = Eigen::BDCSVD<Matrix>(realigned).singularValues()(0);
  const double relaxation = std::sqrt(static_cast<double>(dx * dy)) * sigma_max;
  est.upper = std::min(est.delta_trace_norm, std::max(est.lower, relaxation));
  est.lower = std::min(est.lower, est.upper);
  return est;
}

CorrelationEstimate correlation(const DensityMatrix& rho, const Region& x, const Region& y,
                                const CorrelationOptions& options) {
  if (distance(x, y) <= 0) throw PreconditionError("correlation: regions must be separated (dist > 0)");
  if (!x.is_subset_of(rho.support()) || !y.is_subset_of(rho.support()))
    throw PreconditionError("correlation: regions outside the state's support");
  const int D = rho.local_dim();
  std::vector<std::size_t> keep;
  for (std::size_t s : x.sites()) keep.push_back(rho.support().position_of(s));
  for (std::size_t s : y.sites()) keep.push_back(rho.support().position_of(s));
  const Matrix rxy = linalg::reduce(rho.matrix(), D, rho.support().size(), keep);
  std::vector<std::size_t> xs(x.size()), ys(y.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i;
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = x.size() + i;
  const Matrix rx = linalg::reduce(rxy, D, keep.size(), xs);
  const Matrix ry = linalg::reduce(rxy, D, keep.size(), ys);
  return correlation_bracket(rxy - linalg::kron(rx, ry), static_cast<std::size_t>(rx.rows()),
                             static_cast<std::size_t>(ry.rows()), options);
}

CorrelationEstimate correlation(const GlobalState& rho, const Region& x, const Region& y,
                                const CorrelationOptions& options) {
  if (distance(x, y) <= 0) throw PreconditionError("correlation: regions must be separated (dist > 0)");
  return correlation(rho.reduced(x.unite(y)), x, y, options);
}

double CorrelationProfile::envelope(int distance) const {
  return std::pow(static_cast<double>(num_sites), z) * std::exp(-static_cast<double>(distance) / xi);
}

bool envelope_dominates(const CorrelationProfile& profile, const std::vector<CorrelationSample>& samples) {
  return std::all_of(samples.begin(), samples.end(), [&](const CorrelationSample& s) {
    return s.value <= profile.envelope(s.distance) + kEnvelopeTol;
  });
}

CorrelationProfile fit_profile(const std::vector<CorrelationSample>& samples, std::size_t num_sites) {
  if (num_sites < 2) throw PreconditionError("fit_profile: needs N >= 2");
  std::set<int> distinct;
  for (const auto& s : samples) {
    if (s.distance <= 0) throw PreconditionError("fit_profile: distances must be positive");
    if (s.value < 0.0 || !std::isfinite(s.value)) throw PreconditionError("fit_profile: values must be finite and >= 0");
    distinct.insert(s.distance);
  }
  if (distinct.size() < 2) throw PreconditionError("fit_profile: needs at least two distinct distances");

  CorrelationProfile prof;
  prof.num_sites = num_sites;
  prof.samples = samples;
  std::vector<CorrelationSample> positive;
  for (const auto& s : samples) {
    if (s.value > 0.0) positive.push_back(s);
    else ++prof.dropped_zeros;
  }
  if (positive.empty()) {
    prof.all_zero = true;
    prof.xi = prof.fit_xi = std::numeric_limits<double>::min();
    prof.envelope_ok = true;
    return prof;
  }

  const double log_n = std::log(static_cast<double>(num_sites));
  double fit_inv_xi = std::numeric_limits<double>::infinity();
  std::set<int> positive_distances;
  for (const auto& s : positive) positive_distances.insert(s.distance);
  if (positive_distances.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& s : positive) {
      mx += s.distance;
      my += std::log(s.value);
    }
    mx /= static_cast<double>(positive.size());
    my /= static_cast<double>(positive.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : positive) {
      sxy += (s.distance - mx) * (std::log(s.value) - my);
      sxx += (s.distance - mx) * (s.distance - mx);
    }
    const double slope = sxy / sxx;
    fit_inv_xi = -slope;
    prof.fit_z = (my - slope * mx) / log_n;
  }
  prof.fit_xi = fit_inv_xi > 0.0 ? 1.0 / fit_inv_xi : std::numeric_limits<double>::infinity();

  double z = std::max(0.0, std::ceil(prof.fit_z / kZGrid - 1e-9) * kZGrid);
  double inv_xi = 0.0;
  for (int guard = 0; guard < 100000; ++guard, z += kZGrid) {
    inv_xi = fit_inv_xi > 0.0 ? fit_inv_xi : std::numeric_limits<double>::infinity();
    for (const auto& s : positive)
      inv_xi = std::min(inv_xi, (z * log_n - std::log(s.value)) / s.distance);
    if (inv_xi > 0.0) break;
  }
  prof.z = z;
  prof.xi = 1.0 / inv_xi;
  prof.envelope_ok = envelope_dominates(prof, samples);
  return prof;
}

}  // namespace ensemblekit
