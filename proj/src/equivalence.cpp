#include "ensemblekit/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ensemblekit/error.hpp"
#include "ensemblekit/lattice.hpp"
#include "ensemblekit/quantinfo.hpp"

namespace ensemblekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSlack = 1e-9;
const double kLn2 = std::numbers::ln2;

Condition make_condition(std::string name, double lhs, double rhs) {
  const bool holds = !std::isnan(lhs) && !std::isnan(rhs) && lhs <= rhs;
  return {std::move(name), lhs, rhs, holds};
}

bool all_hold(const std::vector<Condition>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Condition& c) { return c.holds; });
}

// Quantities shared by every Hamiltonian-level statement.
struct Budget {
  double N = 0.0;
  int n = 0;
  int d = 1;
  int D = 2;
  double c = 0.0;
  double u = 0.0;
  double s = 0.0;
  double sigma2 = 0.0;
  double log_n = 0.0;
  double L2 = 0.0;         // ln^{2d}(N)
  double Delta = kInf;
  std::optional<BEDelta> be;
  double log_term = kInf;  // log2(sqrt(N)/(Delta L2) e^{56 sqrt(c) Delta L2}), bits
  double xi = 0.0;
  double z = 0.0;
};

Budget make_budget(const ThermalContext& ctx, const ThermalData& th) {
  Budget b;
  const LatticeSpec& lat = ctx.spec->lattice;
  b.N = static_cast<double>(lat.num_sites());
  b.n = lat.n();
  b.d = lat.d();
  b.D = ctx.spec->local_dim;
  b.c = th.c;
  b.u = th.u;
  b.s = th.s;
  b.sigma2 = th.energy_variance;
  b.log_n = std::log(b.N);
  b.L2 = std::pow(b.log_n, 2.0 * b.d);
  b.xi = ctx.profile.xi;
  b.z = ctx.profile.z;
  if (b.N > 1.0 && b.sigma2 > 0.0) {
    BEParams p;
    p.C_d = ctx.C_d;
    p.k = ctx.k;
    p.xi = b.xi;
    p.z = b.z;
    p.d = b.d;
    p.T = ctx.T;
    p.N = b.N;
    p.sigma2 = b.sigma2;
    b.be = delta_bound(p);
    b.Delta = b.be->value;
    b.log_term = std::log2(std::sqrt(b.N) / (b.Delta * b.L2)) + 56.0 * std::sqrt(b.c) * b.Delta * b.L2 / kLn2;
  }
  return b;
}

// (eps N / (ln^d(4) xi^d))^{1/(d+1)}
double region_capacity(double eps, double N, int d, double xi) {
  const double log_val = std::log(eps) + std::log(N) - d * std::log(std::log(4.0)) - d * std::log(xi);
  return std::exp(log_val / (d + 1));
}

double locality_cost(double xi, int D, int l, int d) {
  return (2.0 * xi * std::log(static_cast<double>(D)) * std::pow(l, d) + l + 2.0) / (xi * kLn2);
}

void add_energy_conditions(std::vector<Condition>& out, const Budget& b, double T, double e, double delta) {
  const double width = std::sqrt(b.c * T * T);
  out.push_back(make_condition("energy_centre", std::abs(e - b.u), std::sqrt(b.c * T * T / b.N)));
  const double lower = 28.0 * b.Delta * width * b.L2 / std::sqrt(b.N);
  out.push_back(make_condition("delta_lower", lower, delta));
  out.push_back(make_condition("delta_upper", delta, width));
  out.push_back(make_condition("delta_window_nonempty", lower, width));
}

Condition region_size_condition(const Budget& b, double eps, int l, double scale) {
  const double lhs = (56.0 * std::sqrt(b.c) * b.Delta * b.L2 + (5.0 + eps * b.z) * b.log_n) / (eps * kLn2) +
                     locality_cost(b.xi, b.D, l, b.d);
  return make_condition("region_size", lhs, scale * region_capacity(eps, b.N, b.d, b.xi));
}

Condition simplified_budget_condition(const Budget& b, double eps) {
  const double lhs = (b.log_term + 3.0) / eps + (b.z + 1.0) * b.log_n;
  const double rhs = (56.0 * std::sqrt(b.c) * b.Delta * b.L2 + (5.0 + eps * b.z) * b.log_n) / (eps * kLn2);
  return make_condition("simplified_budget", lhs, rhs);
}

struct Separation {
  Condition condition;
  double w = 0.0;
  double radius = 0.0;
};

// ceil(W(arg) xi d)^d * budget <= eps (n-l+1)^d, where the S-dependent
// exponent of arg is 2^{exponent_bits / d}.
Separation lambert_separation(std::string name, int n, int d, int l, int D, double xi, double z, double eps,
                              double exponent_bits, double budget) {
  const double span = n - l + 1;
  const double log_arg = std::log(std::pow(2.0, d) - 1.0) / d + std::log(span) - std::log(eps) / d -
                         std::log(xi * d) + exponent_bits / d * kLn2 +
                         2.0 * std::pow(l, d) / d * std::log(static_cast<double>(D)) + z * std::log(n) +
                         (l - 1.0) / (xi * d);
  Separation s;
  s.w = std::isfinite(log_arg) ? lambert_w_log(log_arg) : (log_arg > 0 ? kInf : 0.0);
  const double cells = std::ceil(s.w * xi * d);
  s.radius = cells - l;
  s.condition = make_condition(std::move(name), std::pow(cells, d) * budget, eps * std::pow(span, d));
  return s;
}

double weight_outside_window(const GlobalState& tau, const SpectralDecomposition& spec,
                             const MicrocanonicalWindow& window) {
  const linalg::RealVector pop = tau.populations(spec);
  double inside = 0.0;
  for (std::size_t nu : window.members) inside += pop(static_cast<Eigen::Index>(nu));
  return std::max(0.0, pop.sum() - inside);
}

void require_in_window(const GlobalState& tau, const SpectralDecomposition& spec, const MicrocanonicalWindow& window) {
  const double outside = weight_outside_window(tau, spec, window);
  if (outside > kSupportThreshold)
    throw PreconditionError("state has weight " + std::to_string(outside) + " outside the microcanonical window");
}

bool is_window_uniform(const GlobalState& tau, const SpectralDecomposition& spec, const MicrocanonicalWindow& window) {
  if (tau.kind() != GlobalState::Kind::Diagonal || tau.basis().get() != &spec) return false;
  const linalg::RealVector& w = tau.weights();
  const double target = 1.0 / static_cast<double>(window.dim());
  std::vector<bool> member(static_cast<std::size_t>(w.size()), false);
  for (std::size_t nu : window.members) member[nu] = true;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double expect = member[static_cast<std::size_t>(i)] ? target : 0.0;
    if (std::abs(w(i) - expect) > 1e-12) return false;
  }
  return true;
}

EquivalenceParams make_params(const Budget& b, const ThermalContext& ctx, double e, double delta, int l, double eps) {
  EquivalenceParams p;
  p.N = b.N;
  p.n = b.n;
  p.d = b.d;
  p.l = l;
  p.D = b.D;
  p.T = ctx.T;
  p.e = e;
  p.delta = delta;
  p.eps = eps;
  p.k = ctx.k;
  p.xi = b.xi;
  p.z = b.z;
  p.C_d = ctx.C_d;
  return p;
}

void fill_measured(EquivalenceReport& r, const LocalAverage& avg) {
  r.measured = avg.mean;
  r.measured_max = avg.max;
  r.per_cube = avg.per_cube;
  r.conclusion_holds = r.measured <= r.paper_bound + kSlack;
}

nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

nlohmann::json nums(const std::vector<double>& xs) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

}  // namespace

double lambert_w(double x) {
  if (!(x >= 0.0)) throw PreconditionError("lambert_w: argument must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kInf;
  double w = std::log1p(x);
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w_log(double log_x) {
  if (std::isnan(log_x)) throw PreconditionError("lambert_w_log: NaN argument");
  if (log_x < 700.0) return lambert_w(std::exp(log_x));
  // w + ln w = log_x
  double w = log_x - std::log(log_x);
  for (int it = 0; it < 100; ++it) {
    const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-16 * w) break;
  }
  return w;
}

LocalAverage local_distance_average(const GlobalState& tau, const GlobalState& rho, int l) {
  if (!(tau.lattice() == rho.lattice()) || tau.local_dim() != rho.local_dim())
    throw PreconditionError("local_distance_average: states live on different lattices");
  const LatticeSpec& lat = tau.lattice();
  if (l < 1 || 2 * l > lat.n() + 1)
    throw PreconditionError("local_distance_average: cube length must satisfy 1 <= l <= (n+1)/2");
  const CubeFamily fam = hypercubes(lat, l);
  LocalAverage out;
  out.per_cube.reserve(fam.cubes.size());
  for (const Region& cube : fam.cubes) {
    const double t = trace_distance(tau.reduced(cube), rho.reduced(cube));
    out.per_cube.push_back(t);
    out.mean += t;
    out.max = std::max(out.max, t);
  }
  out.mean /= static_cast<double>(fam.cubes.size());
  return out;
}

double global_relative_entropy_bits(const GlobalState& tau, const GlobalState& rho, bool force_dense) {
  const bool shared_basis = rho.kind() == GlobalState::Kind::Diagonal && tau.kind() != GlobalState::Kind::Dense &&
                            tau.basis() == rho.basis();
  if (!force_dense && shared_basis) {
    const linalg::RealVector pop = tau.populations(*rho.basis());
    const linalg::RealVector& w = rho.weights();
    double cross = 0.0;
    double outside = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w(i) > 0.0) cross += pop(i) * std::log(w(i));
      else outside += pop(i);
    }
    if (outside > kSupportThreshold) return kInf;
    return std::max(0.0, (-tau.entropy() - cross) / kLn2);
  }
  return relative_entropy(tau.to_dense(), rho.to_dense(), Unit::Bits).value;
}

EquivalenceReport check_theorem1(const ThermalContext& ctx, double e, double delta, int l, double eps,
                                 const std::optional<GlobalState>& tau) {
  if (!ctx.spec) throw PreconditionError("check_theorem1: missing spectrum");
  if (!(eps > 0.0)) throw PreconditionError("check_theorem1: eps must be positive");
  const GibbsResult rho = gibbs(ctx.spec, ctx.T);
  const Budget b = make_budget(ctx, rho.thermal);

  EquivalenceReport r;
  r.claim = "canonical_vs_microcanonical";
  r.params = make_params(b, ctx, e, delta, l, eps);
  r.be = b.be;
  add_energy_conditions(r.preconditions, b, ctx.T, e, delta);
  r.preconditions.push_back(region_size_condition(b, eps, l, 1.0));
  r.preconditions_hold = all_hold(r.preconditions);
  r.diagnostics.push_back(simplified_budget_condition(b, eps));

  r.s_bundle = b.log_term / eps + 2.0 / eps;
  const Separation sep = lambert_separation("lambert_separation_s", b.n, b.d, l, b.D, b.xi, b.z, eps,
                                            r.s_bundle, r.s_bundle);
  r.diagnostics.push_back(sep.condition);
  r.lambert_w = sep.w;
  r.separation_radius = sep.radius;

  r.paper_bound = 7.0 * std::sqrt(eps);
  r.trivially_true = r.paper_bound >= 2.0;
  if (tau) {
    try {
      r.window_dim = window_members(*ctx.spec, e, delta).dim();
    } catch (const EmptyWindow&) {
      r.window_dim = 0;
    }
    fill_measured(r, local_distance_average(*tau, rho.state, l));
  } else {
    const MicrocanonicalResult micro = microcanonical(ctx.spec, e, delta);
    r.window_dim = micro.window.dim();
    fill_measured(r, local_distance_average(micro.state, rho.state, l));
  }
  return r;
}

StrongConditions strong_conditions(double S, int n, int d, int l, int D, double xi, double z, double eps) {
  const Separation sep = lambert_separation("lambert_separation", n, d, l, D, xi, z, eps, (S + 1.5) / eps, (S + 2.0) / eps);
  const double N = std::pow(static_cast<double>(n), d);
  const double lhs = (S + 3.0) / eps + locality_cost(xi, D, l, d) + (z + 1.0) * std::log2(N);
  return {sep.condition, make_condition("entropy_budget", lhs, region_capacity(eps, N, d, xi)), sep.w, sep.radius};
}

EquivalenceReport check_prop_strong(const GlobalState& tau, const GlobalState& rho, int l, double eps,
                                    const CorrelationProfile& profile) {
  if (!(eps > 0.0)) throw PreconditionError("check_prop_strong: eps must be positive");
  const double S = global_relative_entropy_bits(tau, rho);
  if (!std::isfinite(S)) throw PreconditionError("check_prop_strong: S(tau||rho) is infinite");
  const LatticeSpec& lat = rho.lattice();

  EquivalenceReport r;
  r.claim = "relative_entropy_strong";
  r.params.N = static_cast<double>(lat.num_sites());
  r.params.n = lat.n();
  r.params.d = lat.d();
  r.params.l = l;
  r.params.D = rho.local_dim();
  r.params.eps = eps;
  r.params.xi = profile.xi;
  r.params.z = profile.z;
  r.relative_entropy_bits = S;

  const auto sc = strong_conditions(S, lat.n(), lat.d(), l, rho.local_dim(), profile.xi, profile.z, eps);
  r.preconditions.push_back(sc.separation);
  r.lambert_w = sc.lambert_w;
  r.separation_radius = sc.radius;
  r.preconditions_hold = all_hold(r.preconditions);
  r.diagnostics.push_back(sc.entropy_budget);

  r.paper_bound = (std::sqrt(2.0) + 2.0 + std::sqrt(kLn2)) * std::sqrt(2.0 * eps);
  r.trivially_true = eps > 0.5 || r.paper_bound >= 2.0;
  fill_measured(r, local_distance_average(tau, rho, l));
  return r;
}

double micro_relent_closed_form(const SpectralDecomposition& spec, double T, const MicrocanonicalWindow& window) {
  const double e_min = spec.energies.minCoeff();
  const double log_z = -e_min / T + std::log((-(spec.energies.array() - e_min) / T).exp().sum());
  double mean = 0.0;
  for (std::size_t nu : window.members) mean += spec.energies(static_cast<Eigen::Index>(nu));
  mean /= static_cast<double>(window.dim());
  return (log_z - std::log(static_cast<double>(window.dim()))) / kLn2 + mean / (T * kLn2);
}

MicroRelEntReport micro_relent_bound(const ThermalContext& ctx, const GlobalState& tau, double e, double delta,
                                     bool force_dense) {
  if (!ctx.spec) throw PreconditionError("micro_relent_bound: missing spectrum");
  const GibbsResult rho = gibbs(ctx.spec, ctx.T);
  const MicrocanonicalWindow window = window_members(*ctx.spec, e, delta);
  require_in_window(tau, *ctx.spec, window);
  const Budget b = make_budget(ctx, rho.thermal);

  MicroRelEntReport r;
  r.window_dim = window.dim();
  r.be = b.be;
  r.lhs = global_relative_entropy_bits(tau, rho.state, force_dense);
  r.lhs_closed_form = is_window_uniform(tau, *ctx.spec, window) ? micro_relent_closed_form(*ctx.spec, ctx.T, window)
                                                                : kNaN;
  r.tau_entropy_bits = tau.entropy() / kLn2;
  r.log_term = b.log_term;
  r.rhs = -r.tau_entropy_bits + std::log2(static_cast<double>(window.dim())) + b.log_term;
  const double sigma = std::sqrt(b.sigma2);
  r.delta0 = 1.5 * std::sqrt(2.0 * std::numbers::pi) * b.Delta * std::exp(2.0) * b.L2 * sigma / b.N;
  r.s_bundle = kNaN;
  add_energy_conditions(r.preconditions, b, ctx.T, e, delta);
  r.preconditions_hold = all_hold(r.preconditions);
  r.bound_holds = r.lhs <= r.rhs + kSlack;
  return r;
}

namespace {

void corollary_conditions(EquivalenceReport& r, const Budget& b, const ThermalContext& ctx, double e, double delta,
                          int l, double eps) {
  add_energy_conditions(r.preconditions, b, ctx.T, e, delta);
  r.preconditions.push_back(region_size_condition(b, eps, l, 0.5));
}

}  // namespace

CorollaryReport check_corollary_state(const ThermalContext& ctx, double e, double delta, const GlobalState& tau,
                                      int l, double eps) {
  if (!ctx.spec) throw PreconditionError("check_corollary: missing spectrum");
  if (!(eps > 0.0)) throw PreconditionError("check_corollary: eps must be positive");
  const GibbsResult rho = gibbs(ctx.spec, ctx.T);
  const MicrocanonicalWindow window = window_members(*ctx.spec, e, delta);
  require_in_window(tau, *ctx.spec, window);
  const Budget b = make_budget(ctx, rho.thermal);

  CorollaryReport out;
  out.part = 1;
  EquivalenceReport& r = out.report;
  r.claim = "subspace_state";
  r.params = make_params(b, ctx, e, delta, l, eps);
  r.be = b.be;
  r.window_dim = window.dim();
  corollary_conditions(r, b, ctx, e, delta, l, eps);
  const double entropy_floor = std::log2(static_cast<double>(window.dim())) -
                               0.5 * eps * region_capacity(eps, b.N, b.d, b.xi);
  r.preconditions.push_back(make_condition("entropy", entropy_floor, tau.entropy() / kLn2));
  r.preconditions_hold = all_hold(r.preconditions);
  r.s_bundle = b.log_term / eps + 2.0 / eps;
  r.paper_bound = 7.0 * std::sqrt(eps);
  r.trivially_true = r.paper_bound >= 2.0;
  fill_measured(r, local_distance_average(tau, rho.state, l));
  return out;
}

CorollaryReport check_corollary_haar(const ThermalContext& ctx, double e, double delta, std::size_t samples,
                                     std::uint64_t seed, int l, double eps) {
  if (!ctx.spec) throw PreconditionError("check_corollary: missing spectrum");
  if (!(eps > 0.0)) throw PreconditionError("check_corollary: eps must be positive");
  if (samples == 0) throw PreconditionError("check_corollary: needs at least one Haar sample");
  const GibbsResult rho = gibbs(ctx.spec, ctx.T);
  const MicrocanonicalResult micro = microcanonical(ctx.spec, e, delta);
  const Budget b = make_budget(ctx, rho.thermal);

  CorollaryReport out;
  out.part = 2;
  EquivalenceReport& r = out.report;
  r.claim = "haar_subspace_state";
  r.params = make_params(b, ctx, e, delta, l, eps);
  r.be = b.be;
  r.window_dim = micro.window.dim();
  corollary_conditions(r, b, ctx, e, delta, l, eps);
  r.preconditions_hold = all_hold(r.preconditions);
  r.s_bundle = b.log_term / eps + 2.0 / eps;

  out.eta = std::cbrt(18.0) * std::numbers::pi *
            std::exp(-b.N / 3.0 * (b.s - (2.0 * std::sqrt(b.c) + 2.0) / std::sqrt(b.N)));
  out.success_probability = 1.0 - 2.0 * std::exp(-1.0 / out.eta);
  const double cube_dim = std::pow(static_cast<double>(b.D), std::pow(l, b.d));
  r.paper_bound = 7.0 * std::sqrt(eps) + out.eta +
                  cube_dim * std::pow(out.eta, 1.5) / std::sqrt(18.0 * std::pow(std::numbers::pi, 3));
  r.trivially_true = r.paper_bound >= 2.0;

  out.window_value = local_distance_average(micro.state, rho.state, l).mean;
  out.samples = samples;
  std::size_t within = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const GlobalState psi = haar_state(micro.window, ctx.spec, seed + i);
    const LocalAverage avg = local_distance_average(psi, rho.state, l);
    out.sample_values.push_back(avg.mean);
    worst = std::max(worst, avg.max);
    if (avg.mean <= r.paper_bound + kSlack) ++within;
  }
  double mean = 0.0;
  for (double v : out.sample_values) mean += v;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (double v : out.sample_values) var += (v - mean) * (v - mean);
  out.sample_mean = mean;
  out.sample_std_error = samples > 1 ? std::sqrt(var / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  out.fraction_within = static_cast<double>(within) / static_cast<double>(samples);
  r.measured = mean;
  r.measured_max = worst;
  r.conclusion_holds = out.fraction_within + 1e-12 >= out.success_probability;
  return out;
}

nlohmann::json to_json(const Condition& c) {
  return {{"name", c.name}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"margin", num(c.margin())}, {"holds", c.holds}};
}

nlohmann::json to_json(const BEDelta& b) {
  return {{"C_d", num(b.C_d)}, {"k", b.k},           {"xi", num(b.xi)},       {"z", num(b.z)},
          {"d", b.d},          {"T", num(b.T)},      {"N", num(b.N)},         {"sigma2", num(b.sigma2)},
          {"K", num(b.K)},     {"value", num(b.value)}, {"rhs", num(b.rhs)}, {"branch", b.branch}};
}

nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json pre = nlohmann::json::array(), diag = nlohmann::json::array();
  for (const auto& c : r.preconditions) pre.push_back(to_json(c));
  for (const auto& c : r.diagnostics) diag.push_back(to_json(c));
  const auto& p = r.params;
  nlohmann::json j = {
      {"claim", r.claim},
      {"params",
       {{"N", num(p.N)}, {"n", p.n}, {"d", p.d}, {"l", p.l}, {"D", p.D}, {"T", num(p.T)}, {"e", num(p.e)},
        {"delta", num(p.delta)}, {"eps", num(p.eps)}, {"k", p.k}, {"xi", num(p.xi)}, {"z", num(p.z)},
        {"C_d", num(p.C_d)}}},
      {"preconditions", pre},
      {"diagnostics", diag},
      {"paper_bound", num(r.paper_bound)},
      {"measured", num(r.measured)},
      {"measured_max", num(r.measured_max)},
      {"per_cube", nums(r.per_cube)},
      {"preconditions_hold", r.preconditions_hold},
      {"conclusion_holds", r.conclusion_holds},
      {"trivially_true", r.trivially_true},
      {"relative_entropy_bits", num(r.relative_entropy_bits)},
      {"s_bundle", num(r.s_bundle)},
      {"lambert_w", num(r.lambert_w)},
      {"separation_radius", num(r.separation_radius)},
      {"window_dim", r.window_dim}};
  j["berry_esseen_delta"] = r.be ? to_json(*r.be) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const MicroRelEntReport& r) {
  nlohmann::json pre = nlohmann::json::array();
  for (const auto& c : r.preconditions) pre.push_back(to_json(c));
  nlohmann::json j = {{"lhs", num(r.lhs)},
                      {"lhs_closed_form", num(r.lhs_closed_form)},
                      {"rhs", num(r.rhs)},
                      {"log_term", num(r.log_term)},
                      {"delta0", num(r.delta0)},
                      {"tau_entropy_bits", num(r.tau_entropy_bits)},
                      {"window_dim", r.window_dim},
                      {"preconditions", pre},
                      {"preconditions_hold", r.preconditions_hold},
                      {"bound_holds", r.bound_holds}};
  j["berry_esseen_delta"] = r.be ? to_json(*r.be) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const CorollaryReport& r) {
  nlohmann::json j = {{"part", r.part}, {"report", to_json(r.report)}};
  if (r.part == 2) {
    j["eta"] = num(r.eta);
    j["success_probability"] = num(r.success_probability);
    j["samples"] = r.samples;
    j["fraction_within"] = num(r.fraction_within);
    j["sample_mean"] = num(r.sample_mean);
    j["sample_std_error"] = num(r.sample_std_error);
    j["window_value"] = num(r.window_value);
    j["sample_values"] = nums(r.sample_values);
  }
  return j;
}

}  // namespace ensemblekit
