#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemblekit/berry_esseen.hpp"
#include "ensemblekit/correlations.hpp"
#include "ensemblekit/operators.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

// Principal branch W(x) >= 0 of w e^w = x, by Halley iteration.
double lambert_w(double x);
// W(exp(log_x)) without forming exp(log_x); usable far beyond double range.
double lambert_w_log(double log_x);

struct LocalAverage {
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> per_cube;  // in hypercubes() order
};

// Average of ||tau_C - rho_C||_1 over every cube of edge l.
LocalAverage local_distance_average(const GlobalState& tau, const GlobalState& rho, int l);

// lhs <= rhs, both sides recorded.
struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double margin() const { return rhs - lhs; }
};

struct EquivalenceParams {
  double N = 0.0;
  int n = 0;
  int d = 1;
  int l = 1;
  int D = 2;
  double T = 0.0;
  double e = 0.0;
  double delta = 0.0;
  double eps = 0.0;
  int k = 1;
  double xi = 0.0;
  double z = 0.0;
  double C_d = 1.0;
};

struct EquivalenceReport {
  std::string claim;
  EquivalenceParams params;
  std::vector<Condition> preconditions;
  std::vector<Condition> diagnostics;   // derived inequalities reported alongside
  double paper_bound = 0.0;
  double measured = 0.0;
  double measured_max = 0.0;
  std::vector<double> per_cube;
  bool preconditions_hold = false;
  bool conclusion_holds = false;
  bool trivially_true = false;          // bound >= 2 (or eps > 1/2 for the strong form)
  double relative_entropy_bits = 0.0;   // S(tau||rho) where it enters the condition
  double s_bundle = 0.0;                // exponent bundle s, when a Hamiltonian is involved
  double lambert_w = 0.0;
  double separation_radius = 0.0;
  std::size_t window_dim = 0;
  std::optional<BEDelta> be;
};

// Thermal quantities every Hamiltonian-level check shares.
struct ThermalContext {
  std::shared_ptr<const SpectralDecomposition> spec;
  int k = 1;
  double T = 1.0;
  CorrelationProfile profile;
  double C_d = 1.0;
};

// S(tau||rho) in bits for whole-lattice states; uses the eigenbasis when both
// share one, otherwise dense matrix logarithms (force_dense selects the latter).
double global_relative_entropy_bits(const GlobalState& tau, const GlobalState& rho, bool force_dense = false);

// Evaluates the three preconditions, the region-size budget and 7 sqrt(eps)
// against the measured average. `tau` replaces the microcanonical state
// when given.
EquivalenceReport check_theorem1(const ThermalContext& ctx, double e, double delta, int l, double eps,
                                 const std::optional<GlobalState>& tau = std::nullopt);

// Separation condition for S(tau||rho) = S bits together with the simpler
// entropy budget that implies it.
struct StrongConditions {
  Condition separation;
  Condition entropy_budget;
  double lambert_w = 0.0;
  double radius = 0.0;
};

StrongConditions strong_conditions(double S, int n, int d, int l, int D, double xi, double z, double eps);

// Lambert-W separation condition and its simplified form for a given pair.
EquivalenceReport check_prop_strong(const GlobalState& tau, const GlobalState& rho, int l, double eps,
                                    const CorrelationProfile& profile);

struct MicroRelEntReport {
  double lhs = 0.0;             // S(tau||rho_T), bits
  double lhs_closed_form = 0.0; // diagonal formula, NaN unless tau is the window-uniform state
  double rhs = 0.0;
  double log_term = 0.0;        // log2(sqrt(N)/(Delta ln^{2d}N) e^{56 sqrt(c) Delta ln^{2d}N})
  double delta0 = 0.0;
  double s_bundle = 0.0;
  double tau_entropy_bits = 0.0;
  std::size_t window_dim = 0;
  std::vector<Condition> preconditions;
  bool preconditions_hold = false;
  bool bound_holds = false;
  std::optional<BEDelta> be;
};

// Throws PreconditionError when tau has weight outside the window.
MicroRelEntReport micro_relent_bound(const ThermalContext& ctx, const GlobalState& tau, double e, double delta,
                                     bool force_dense = false);

// log2 Z(T) - log2 |M| + mean window energy / (T ln 2).
double micro_relent_closed_form(const SpectralDecomposition& spec, double T, const MicrocanonicalWindow& window);

struct CorollaryReport {
  int part = 1;
  EquivalenceReport report;
  // part 2
  double eta = 0.0;
  double success_probability = 0.0;  // 1 - 2 exp(-1/eta)
  std::size_t samples = 0;
  double fraction_within = 0.0;
  double sample_mean = 0.0;
  double sample_std_error = 0.0;
  double window_value = 0.0;         // local average of the window-uniform state
  std::vector<double> sample_values;
};

// Part 1 with a supplied subspace state.
CorollaryReport check_corollary_state(const ThermalContext& ctx, double e, double delta, const GlobalState& tau,
                                      int l, double eps);
// Part 2 with `samples` Haar states drawn from seeds seed, seed+1, ...
CorollaryReport check_corollary_haar(const ThermalContext& ctx, double e, double delta, std::size_t samples,
                                     std::uint64_t seed, int l, double eps);

nlohmann::json to_json(const Condition& c);
nlohmann::json to_json(const BEDelta& b);
nlohmann::json to_json(const EquivalenceReport& r);
nlohmann::json to_json(const MicroRelEntReport& r);
nlohmann::json to_json(const CorollaryReport& r);

}  // namespace ensemblekit
