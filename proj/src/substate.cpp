#include "ensemblekit/substate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ensemblekit/error.hpp"
#include "ensemblekit/quantinfo.hpp"

namespace ensemblekit {

using linalg::Matrix;

namespace {

constexpr double kSlack = 1e-9;
constexpr double kMixGrid = 1e-3;

void require_same_space(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (!(a.support() == b.support()) || a.local_dim() != b.local_dim())
    throw PreconditionError(std::string(what) + ": states live on different supports");
}

void require_disjoint(const std::vector<Region>& regions, const Region& support, const char* what) {
  if (regions.empty()) throw PreconditionError(std::string(what) + ": no regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!regions[i].is_subset_of(support))
      throw PreconditionError(std::string(what) + ": region outside the state's support");
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      if (regions[i].overlaps(regions[j])) throw PreconditionError(std::string(what) + ": regions overlap");
  }
}

double log2_one_minus_inverse(double x) { return -std::log2(1.0 - x); }

}  // namespace

SubstateWitness substate_smooth(const DensityMatrix& tau, const DensityMatrix& rho, double eps) {
  require_same_space(tau, rho, "substate_smooth");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("substate_smooth: eps must lie in (0, 1)");
  const double rel = relative_entropy(tau, rho, Unit::Bits).value;
  if (!std::isfinite(rel)) throw PreconditionError("substate_smooth: S(tau||rho) is infinite");
  const double lambda = (rel + 1.0) / eps + log2_one_minus_inverse(eps);

  // Non-negative eigenspace of 2^lambda rho - tau, scaled by 2^-lambda.
  const Matrix gap = rho.matrix() - std::exp2(-lambda) * tau.matrix();
  const Matrix proj = linalg::spectral_projector(gap, -1e-12);
  Matrix projected = proj * tau.matrix() * proj;
  const double kept = projected.trace().real();
  Matrix base = kept > 1e-14 ? Matrix(projected / kept) : rho.matrix();
  base = linalg::hermitian_part(base);

  const double base_smax = detail::max_relative_entropy_bits(base, rho.matrix(), kSupportThreshold);
  const double base_dist = linalg::trace_norm_hermitian(base - tau.matrix());

  // lambda_max(rho^-1/2 ((1-w) base + w rho) rho^-1/2) = (1-w) L + w, so the
  // smallest admissible weight is available in closed form.
  double weight = 0.0;
  if (base_smax > lambda + kSlack) {
    const double L = std::exp2(base_smax);
    const double target = std::exp2(lambda);
    const double w_min = std::isfinite(L) ? (L - target) / (L - 1.0) : 1.0;
    weight = std::min(1.0, std::ceil(w_min / kMixGrid - 1e-9) * kMixGrid);
  }
  Matrix candidate;
  double smax = 0.0;
  for (;; weight = std::min(1.0, weight + kMixGrid)) {
    candidate = (1.0 - weight) * base + weight * rho.matrix();
    smax = detail::max_relative_entropy_bits(candidate, rho.matrix(), kSupportThreshold);
    if (smax <= lambda + kSlack || weight >= 1.0) break;
  }
  const double dist = linalg::trace_norm_hermitian(candidate - tau.matrix());
  const double dist_bound = 2.0 * std::sqrt(eps);
  if (smax > lambda + kSlack || dist > dist_bound + kSlack) {
    std::ostringstream os;
    os.precision(12);
    os << "substate_smooth: no admissible state (eps=" << eps << ", S=" << rel << " bits, lambda=" << lambda
       << "; projection S_max=" << base_smax << ", distance=" << base_dist << "; mixed w=" << weight
       << " S_max=" << smax << ", distance=" << dist << " > " << dist_bound << ")";
    throw SubstateConstructionFailure(os.str());
  }

  SubstateWitness w{DensityMatrix(tau.support(), tau.local_dim(), candidate)};
  w.lambda_bound = lambda;
  w.achieved_smax = smax;
  w.distance = dist;
  w.distance_bound = dist_bound;
  w.mixing_weight = weight;
  w.relative_entropy_bits = rel;
  w.projection_smax = base_smax;
  w.projection_distance = base_dist;
  return w;
}

SubstateWitness datta_renner_transfer(const DensityMatrix& pi_tilde, const DensityMatrix& rho,
                                      const DensityMatrix& rho_tilde, double lambda) {
  require_same_space(pi_tilde, rho, "datta_renner_transfer");
  require_same_space(rho, rho_tilde, "datta_renner_transfer");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw PreconditionError("datta_renner_transfer: lambda must be finite and >= 0");
  const double smax_in = max_relative_entropy(pi_tilde, rho).value;
  if (smax_in > lambda + kSlack) {
    std::ostringstream os;
    os << "datta_renner_transfer: S_max(pi~||rho) = " << smax_in << " exceeds lambda = " << lambda;
    throw PreconditionError(os.str());
  }
  const double scale = std::exp2(lambda);
  const Matrix diff = rho.matrix() - rho_tilde.matrix();
  const double kappa = scale * linalg::trace_norm_hermitian(diff);
  if (kappa >= 1.0) {
    std::ostringstream os;
    os << "datta_renner_transfer: kappa = " << kappa << " >= 1";
    throw KappaTooLarge(os.str());
  }

  const Matrix Y = scale * rho_tilde.matrix();
  const Matrix Delta = scale * linalg::abs_hermitian(diff);
  const Matrix sum = Y + Delta;
  const double threshold = 1e-12 * std::max(1.0, linalg::max_eigenvalue(sum));
  const Matrix T = linalg::sqrt_psd(Y) * linalg::pinv_sqrt_psd(sum, threshold);
  const Matrix TdT = T.adjoint() * T;
  const double retained = (TdT * pi_tilde.matrix()).trace().real();
  const Matrix image = T * pi_tilde.matrix() * T.adjoint();
  Matrix pi = linalg::hermitian_part(image / retained);

  const auto I = Matrix::Identity(TdT.rows(), TdT.cols());
  TransferChecks checks;
  checks.contraction_excess = linalg::max_eigenvalue(TdT - I);
  checks.retained_weight = retained;
  checks.retained_deficit = (1.0 - kappa) - retained;
  checks.domination_excess = linalg::max_eigenvalue(image - Y);
  checks.kappa_trace = kappa;

  SubstateWitness w{DensityMatrix(pi_tilde.support(), pi_tilde.local_dim(), std::move(pi))};
  w.kappa = kappa;
  w.lambda_bound = lambda + log2_one_minus_inverse(kappa);
  w.achieved_smax = max_relative_entropy(w.pi, rho_tilde).value;
  w.distance = trace_distance(pi_tilde, w.pi);
  w.distance_bound = std::sqrt(8.0 * kappa);
  w.checks = checks;
  return w;
}

double ProductApproximation::triangle_sum() const {
  return std::accumulate(per_step.begin(), per_step.end(), 0.0);
}

ProductApproximation product_approximation(const DensityMatrix& rho, const std::vector<Region>& regions,
                                           const CorrelationOptions& options) {
  require_disjoint(regions, rho.support(), "product_approximation");
  std::vector<DensityMatrix> marginals;
  marginals.reserve(regions.size());
  for (const auto& r : regions) marginals.push_back(partial_trace(rho, r));

  ProductApproximation out;
  Region prefix = regions.front();
  for (std::size_t j = 1; j < regions.size(); ++j) {
    const Region next = prefix.unite(regions[j]);
    const DensityMatrix joint = partial_trace(rho, next);
    const DensityMatrix split[] = {partial_trace(rho, prefix), marginals[j]};
    out.per_step.push_back(trace_distance(joint, tensor_product(split)));
    const double dim_j = static_cast<double>(marginals[j].dim());
    const auto cor = correlation(joint, prefix, regions[j], options);
    out.step_bounds.push_back(dim_j * dim_j * cor.upper);
    prefix = next;
  }
  const DensityMatrix all = partial_trace(rho, prefix);
  out.lhs = trace_distance(all, tensor_product(marginals));
  out.rhs = std::accumulate(out.step_bounds.begin(), out.step_bounds.end(), 0.0);
  return out;
}

ProductReferenceWitness product_reference_witness(const DensityMatrix& tau, const DensityMatrix& rho,
                                                  const std::vector<Region>& regions, double eps,
                                                  const CorrelationOptions& options) {
  require_same_space(tau, rho, "product_reference_witness");
  require_disjoint(regions, rho.support(), "product_reference_witness");
  Region joint = regions.front();
  for (const auto& r : regions) joint = joint.unite(r);

  const double rel = relative_entropy(tau, rho, Unit::Bits).value;
  if (!std::isfinite(rel)) throw PreconditionError("product_reference_witness: S(tau||rho) is infinite");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("product_reference_witness: eps must lie in (0, 1)");
  const double lambda = (rel + 1.0) / eps + log2_one_minus_inverse(eps);

  const DensityMatrix tau_c = partial_trace(tau, joint);
  const DensityMatrix rho_c = partial_trace(rho, joint);
  SubstateWitness smoothed = substate_smooth(tau_c, rho_c, eps);

  std::vector<DensityMatrix> marginals;
  for (const auto& r : regions) marginals.push_back(partial_trace(rho, r));
  const DensityMatrix product = tensor_product(marginals);

  ProductReferenceWitness out{smoothed, smoothed, lambda, 0.0, 0.0, lambda, 2.0 * std::sqrt(eps), 0.0, 0.0,
                              smoothed.pi};
  if (regions.size() > 1) {
    const auto approx = product_approximation(rho, regions, options);
    out.correlation_sum = approx.rhs;
    out.kappa = std::exp2(lambda) * approx.rhs;
    if (out.kappa >= 1.0) {
      std::ostringstream os;
      os << "product_reference_witness: kappa = " << out.kappa << " >= 1 (lambda = " << lambda
         << " bits, correlation sum = " << approx.rhs << ")";
      throw KappaTooLarge(os.str());
    }
    out.transferred = datta_renner_transfer(smoothed.pi, rho_c, product, lambda);
    out.pi = out.transferred.pi;
    out.smax_bound = lambda + log2_one_minus_inverse(out.kappa);
    out.distance_bound = 2.0 * std::sqrt(eps) + std::sqrt(8.0 * out.kappa);
  }
  out.achieved_smax = max_relative_entropy(out.pi, product).value;
  out.distance = trace_distance(out.pi, tau_c);
  return out;
}

}  // namespace ensemblekit
