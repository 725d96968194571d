#pragma once

#include <vector>

#include "ensemblekit/correlations.hpp"
#include "ensemblekit/lattice.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

// Operator inequalities established while transferring a bounded S_max to a
// nearby reference. Each value is the largest violation found (<= 0 means
// satisfied exactly).
struct TransferChecks {
  double contraction_excess = 0.0;  // lambda_max(T^dag T - I)
  double retained_weight = 0.0;     // tr[T^dag T pi~]
  double retained_deficit = 0.0;    // (1 - kappa) - tr[T^dag T pi~]
  double domination_excess = 0.0;   // lambda_max(T pi~ T^dag - Y)
  double kappa_trace = 0.0;         // 2^lambda ||rho~ - rho||_1

  bool hold(double slack = 1e-9) const {
    return contraction_excess <= slack && retained_deficit <= slack && domination_excess <= slack;
  }
};

// A constructed state together with the bounds it is certified to meet.
struct SubstateWitness {
  DensityMatrix pi;
  double lambda_bound = 0.0;     // advertised S_max bound (bits)
  double achieved_smax = 0.0;    // measured S_max(pi || reference) (bits)
  double kappa = 0.0;
  double distance = 0.0;         // ||pi - original||_1
  double distance_bound = 0.0;
  double mixing_weight = 0.0;    // weight of the reference mixed in by the fallback
  double relative_entropy_bits = 0.0;
  double projection_smax = 0.0;  // S_max of the bare projected state
  double projection_distance = 0.0;
  TransferChecks checks;

  bool verified(double slack = 1e-9) const {
    return achieved_smax <= lambda_bound + slack && distance <= distance_bound + slack;
  }
};

// Constructs pi~ with S_max(pi~||rho) <= (S(tau||rho)+1)/eps + log2(1/(1-eps))
// and ||pi~ - tau||_1 <= 2 sqrt(eps). The eigenspace truncation is tried
// first; if it misses the S_max bound, rho is mixed in with the smallest
// weight on a 1e-3 grid that restores it.
SubstateWitness substate_smooth(const DensityMatrix& tau, const DensityMatrix& rho, double eps);

// Given S_max(pi~||rho) <= lambda and kappa = 2^lambda ||rho~ - rho||_1 < 1,
// returns pi = T pi~ T^dag / tr[T^dag T pi~] with T = Y^{1/2}(Y+Delta)^{-1/2}.
SubstateWitness datta_renner_transfer(const DensityMatrix& pi_tilde, const DensityMatrix& rho,
                                   const DensityMatrix& rho_tilde, double lambda);

struct ProductApproximation {
  double lhs = 0.0;                // ||rho_{A1..AM} - rho_A1 x ... x rho_AM||_1
  double rhs = 0.0;                // sum_j D_{Aj}^2 cor-upper(A1..A_{j-1}, Aj)
  std::vector<double> per_step;    // ||rho_{A1..Aj} - rho_{A1..Aj-1} x rho_Aj||_1, j >= 2
  std::vector<double> step_bounds; // D_{Aj}^2 cor-upper for each step
  double triangle_sum() const;
};

// Regions must be pairwise disjoint.
ProductApproximation product_approximation(const DensityMatrix& rho, const std::vector<Region>& regions,
                                           const CorrelationOptions& options = {});

struct ProductReferenceWitness {
  SubstateWitness smoothed;     // on tau_C versus rho_C
  SubstateWitness transferred;  // pi versus the product reference
  double lambda = 0.0;          // (S(tau||rho)+1)/eps + log2(1/(1-eps))
  double kappa = 0.0;           // 2^lambda * sum_j D^{2|Cj|} cor-upper
  double correlation_sum = 0.0;
  double smax_bound = 0.0;      // lambda + log2(1/(1-kappa))
  double distance_bound = 0.0;  // 2 sqrt(eps) + sqrt(8 kappa)
  double achieved_smax = 0.0;   // S_max(pi || product reference)
  double distance = 0.0;        // ||pi - tau_C||_1
  DensityMatrix pi;

  bool verified(double slack = 1e-9) const {
    return kappa < 1.0 && achieved_smax <= smax_bound + slack && distance <= distance_bound + slack;
  }
};

// Smooths tau on the union of `regions`, then moves the reference from rho_C
// to the product of its marginals. Throws KappaTooLarge when the
// correlation budget does not allow the transfer.
ProductReferenceWitness product_reference_witness(const DensityMatrix& tau, const DensityMatrix& rho, const std::vector<Region>& regions,
                               double eps, const CorrelationOptions& options = {});

}  // namespace ensemblekit
