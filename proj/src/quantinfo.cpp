#include "ensemblekit/quantinfo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensemblekit/error.hpp"

namespace ensemblekit {

using linalg::Complex;
using linalg::Matrix;
using linalg::RealVector;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_space(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (a.dim() != b.dim() || !(a.support() == b.support()) || a.local_dim() != b.local_dim())
    throw PreconditionError(std::string(what) + ": states live on different supports or dimensions");
}

// Weight of tau outside the eigenvectors of rho with eigenvalue > threshold.
double weight_outside_support(const Matrix& tau, const linalg::HermitianEigen& rho_eig, double threshold) {
  double w = 0.0;
  for (Eigen::Index j = 0; j < rho_eig.values.size(); ++j) {
    if (rho_eig.values(j) > threshold) continue;
    const auto v = rho_eig.vectors.col(j);
    w += v.dot(tau * v).real();
  }
  return w;
}

}  // namespace

const char* unit_name(Unit u) { return u == Unit::Bits ? "bits" : "nats"; }

bool DivergenceValue::finite() const noexcept { return std::isfinite(value); }

DivergenceValue DivergenceValue::in(Unit target) const {
  if (target == unit || !finite()) return {value, target};
  return {target == Unit::Bits ? value / std::log(2.0) : value * std::log(2.0), target};
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_space(rho, sigma, "trace_distance");
  return linalg::trace_norm_hermitian(rho.matrix() - sigma.matrix());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector ev = linalg::eigvalsh(rho.matrix());
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
  return s;
}

namespace detail {

double relative_entropy_nats(const Matrix& tau, const Matrix& rho, double support_threshold) {
  const auto rho_eig = linalg::eigh(rho);
  if (weight_outside_support(tau, rho_eig, support_threshold) > support_threshold) return kInf;
  const RealVector tau_ev = linalg::eigvalsh(tau);
  double tau_log_tau = 0.0;
  for (Eigen::Index i = 0; i < tau_ev.size(); ++i)
    if (tau_ev(i) > 0.0) tau_log_tau += tau_ev(i) * std::log(tau_ev(i));
  double tau_log_rho = 0.0;
  for (Eigen::Index j = 0; j < rho_eig.values.size(); ++j) {
    if (rho_eig.values(j) <= support_threshold) continue;
    const auto v = rho_eig.vectors.col(j);
    tau_log_rho += v.dot(tau * v).real() * std::log(rho_eig.values(j));
  }
  return std::max(0.0, tau_log_tau - tau_log_rho);
}

double max_relative_entropy_bits(const Matrix& tau, const Matrix& rho, double support_threshold) {
  const auto rho_eig = linalg::eigh(rho);
  if (weight_outside_support(tau, rho_eig, support_threshold) > support_threshold) return kInf;
  const Matrix inv_sqrt = linalg::from_eigen(
      rho_eig, [support_threshold](double x) { return x > support_threshold ? 1.0 / std::sqrt(x) : 0.0; });
  const double lambda = linalg::max_eigenvalue(inv_sqrt * tau * inv_sqrt);
  return std::max(0.0, std::log2(lambda));
}

}  // namespace detail

DivergenceValue relative_entropy(const DensityMatrix& tau, const DensityMatrix& rho, Unit unit,
                                 double support_threshold) {
  require_same_space(tau, rho, "relative_entropy");
  const DivergenceValue nats{detail::relative_entropy_nats(tau.matrix(), rho.matrix(), support_threshold),
                             Unit::Nats};
  return nats.in(unit);
}

DivergenceValue max_relative_entropy(const DensityMatrix& tau, const DensityMatrix& rho,
                                     double support_threshold) {
  require_same_space(tau, rho, "max_relative_entropy");
  return {detail::max_relative_entropy_bits(tau.matrix(), rho.matrix(), support_threshold), Unit::Bits};
}

double free_energy(const DensityMatrix& tau, const Matrix& hamiltonian, double T) {
  if (!(T > 0.0)) throw PreconditionError("free_energy: temperature must be positive");
  if (hamiltonian.rows() != static_cast<Eigen::Index>(tau.dim()))
    throw PreconditionError("free_energy: Hamiltonian dimension mismatch");
  const double energy = (hamiltonian * tau.matrix()).trace().real();
  return energy - T * von_neumann_entropy(tau);
}

double free_energy(const GlobalState& tau, const SpectralDecomposition& spec, double T) {
  if (!(T > 0.0)) throw PreconditionError("free_energy: temperature must be positive");
  return tau.energy(spec) - T * tau.entropy();
}

}  // namespace ensemblekit
