#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ensemblekit/lattice.hpp"
#include "ensemblekit/linalg.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

// Bracket on cor_rho(X, Y) = max |tr((P x Q)(rho_XY - rho_X x rho_Y))| over
// ||P||, ||Q|| <= 1.
//
// `lower` is attained by the Hermitian witnesses (P, Q). `upper` is the
// operator-Schmidt relaxation sqrt(D_X D_Y) sigma_max(realigned Delta), which
// bounds the maximum over all bounded operators, clamped into
// [lower, ||Delta||_1].
struct CorrelationEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double delta_trace_norm = 0.0;  // ||rho_XY - rho_X x rho_Y||_1
  linalg::Matrix p;               // on X
  linalg::Matrix q;               // on Y
};

struct CorrelationOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

// `rho` must contain X and Y in its support; requires dist(X, Y) > 0.
CorrelationEstimate correlation(const DensityMatrix& rho, const Region& x, const Region& y,
                                const CorrelationOptions& options = {});
CorrelationEstimate correlation(const GlobalState& rho, const Region& x, const Region& y,
                                const CorrelationOptions& options = {});

// Same bracket for an operator Delta already laid out as (X factors, Y factors).
CorrelationEstimate correlation_bracket(const linalg::Matrix& delta, std::size_t dim_x, std::size_t dim_y,
                                        const CorrelationOptions& options = {});

struct CorrelationSample {
  int distance;
  double value;
};

// Certified envelope value <= N^z exp(-dist / xi) over every sample.
struct CorrelationProfile {
  double xi = 0.0;
  double z = 0.0;
  double fit_xi = 0.0;  // regression estimate before inflation
  double fit_z = 0.0;
  std::size_t num_sites = 0;
  std::vector<CorrelationSample> samples;
  std::size_t dropped_zeros = 0;
  bool envelope_ok = false;
  bool all_zero = false;

  double envelope(int distance) const;
};

CorrelationProfile fit_profile(const std::vector<CorrelationSample>& samples, std::size_t num_sites);

// Checks value <= envelope + 1e-9 for every sample.
bool envelope_dominates(const CorrelationProfile& profile, const std::vector<CorrelationSample>& samples);

}  // namespace ensemblekit
