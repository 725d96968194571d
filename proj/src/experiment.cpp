#include "ensemblekit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ensemblekit/berry_esseen.hpp"
#include "ensemblekit/equivalence.hpp"
#include "ensemblekit/error.hpp"
#include "ensemblekit/svg.hpp"

#ifndef ENSEMBLEKIT_VERSION
#define ENSEMBLEKIT_VERSION "dev"
#endif

namespace ensemblekit {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxDim = 4096;

const std::set<std::string> kTopKeys = {"model",    "sizes",     "temperatures", "cube_lengths", "energy_targets",
                                        "deltas",   "epsilons",  "C_d",          "correlation",  "haar",
                                        "tau",      "output_dir", "workers"};
const std::set<std::string> kModelKeys = {"family", "n", "d", "local_dim", "k", "params", "seed"};
const std::set<std::string> kCorrelationKeys = {"distances", "restarts", "seed"};
const std::set<std::string> kHaarKeys = {"samples", "seed"};

void warn_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix,
                  std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) warnings.push_back("unknown key '" + prefix + it.key() + "' ignored");
}

template <typename T>
std::vector<T> dedupe(const std::vector<T>& xs, const std::string& field, std::vector<std::string>& warnings) {
  std::vector<T> out;
  for (const T& x : xs)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  if (out.size() != xs.size()) warnings.push_back("duplicate entries in '" + field + "' removed");
  return out;
}

std::vector<double> number_list(const json& j, const std::string& field, bool positive) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a nonempty list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_number()) throw ConfigError(path, "must be a number");
    const double v = j[i].get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    if (positive && !(v > 0.0)) throw ConfigError(path, "must be positive");
    out.push_back(v);
  }
  return out;
}

std::vector<int> int_list(const json& j, const std::string& field, int minimum) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a nonempty list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_integer()) throw ConfigError(path, "must be an integer");
    const long long v = j[i].get<long long>();
    if (v < minimum || v > 1000000) throw ConfigError(path, "must be an integer >= " + std::to_string(minimum));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::uint64_t seed_value(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(field, "must be a non-negative integer");
  return j.get<std::uint64_t>();
}

int int_value(const json& j, const std::string& field, int minimum) {
  if (!j.is_number_integer() || j.get<long long>() < minimum)
    throw ConfigError(field, "must be an integer >= " + std::to_string(minimum));
  return j.get<int>();
}

std::size_t hilbert_dim(int D, int n, int d) {
  double log_dim = std::pow(static_cast<double>(n), d) * std::log(static_cast<double>(D));
  if (log_dim > std::log(static_cast<double>(kMaxDim)) + 1e-9) return kMaxDim + 1;
  return static_cast<std::size_t>(std::llround(std::exp(log_dim)));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Failure {
  std::string code;
  std::string message;
};

template <typename F>
std::optional<Failure> guarded(F&& f) {
  try {
    f();
    return std::nullopt;
  } catch (const Error& e) {
    return Failure{e.code(), e.what()};
  } catch (const std::exception& e) {
    return Failure{"internal", e.what()};
  }
}

struct SizeData {
  int n = 0;
  std::size_t N = 0;
  std::size_t dim = 0;
  int k = 1;
  std::shared_ptr<const SpectralDecomposition> spec;
  std::optional<Failure> failure;
};

struct ThermalTask {
  std::size_t size_index = 0;
  double T = 0.0;
  ThermalData thermal{};
  CorrelationProfile profile;
  double kolmogorov = std::numeric_limits<double>::quiet_NaN();
  std::optional<SpectralCDF> cdf;
  std::optional<Failure> failure;
};

struct PointResult {
  std::size_t size_index = 0;
  std::size_t thermal_index = 0;
  int l = 1;
  double e = 0.0;
  double delta = 0.0;
  std::optional<double> e_target;
  std::optional<double> delta_value;
  double eps = 0.0;
  std::optional<Failure> failure;
  std::optional<EquivalenceReport> theorem;
  std::optional<EquivalenceReport> strong;
  std::optional<MicroRelEntReport> relent;
  std::optional<CorollaryReport> corollary;
  std::optional<CorollaryReport> haar;
  double global_trace_distance = 0.0;
};

double margin_of(const std::vector<Condition>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c.margin();
  return std::numeric_limits<double>::quiet_NaN();
}

const Condition* find_condition(const std::vector<Condition>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

double diagonal_distance(const GlobalState& a, const GlobalState& b) {
  return (a.weights() - b.weights()).cwiseAbs().sum();
}

json thermal_json(const ThermalData& th) {
  return {{"T", num(th.T)},  {"Z", num(th.Z)},
          {"log_Z", num(th.log_Z)}, {"u", num(th.u)},
          {"c", num(th.c)},  {"s", num(th.s)},
          {"mean_energy", num(th.mean_energy)}, {"energy_variance", num(th.energy_variance)}};
}

json profile_json(const CorrelationProfile& p) {
  json samples = json::array();
  for (const auto& s : p.samples) samples.push_back({{"distance", s.distance}, {"value", num(s.value)}});
  return {{"xi", num(p.xi)}, {"z", num(p.z)}, {"fit_xi", num(p.fit_xi)}, {"fit_z", num(p.fit_z)},
          {"envelope_ok", p.envelope_ok}, {"all_zero", p.all_zero}, {"dropped_zeros", p.dropped_zeros},
          {"samples", samples}};
}

json failure_json(const std::optional<Failure>& f) {
  if (!f) return nullptr;
  return {{"code", f->code}, {"message", f->message}};
}

}  // namespace

const char* tool_version() { return ENSEMBLEKIT_VERSION; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = model.to_json();
  j["sizes"] = sizes;
  j["temperatures"] = temperatures;
  j["cube_lengths"] = cube_lengths;
  j["energy_targets"] = energy_at_u ? json("u(T)") : json(energy_targets);
  j["deltas"] = paper_window ? json("paper-window") : json(deltas);
  j["epsilons"] = epsilons;
  j["C_d"] = C_d;
  j["correlation"] = {{"distances", correlation.distances}, {"restarts", correlation.restarts},
                      {"seed", correlation.seed}};
  j["haar"] = haar ? json{{"samples", haar->samples}, {"seed", haar->seed}} : json(nullptr);
  j["tau"] = tau;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  return j;
}

ValidatedConfig validate_config(const json& j) {
  ValidatedConfig out;
  auto& cfg = out.config;
  auto& warnings = out.warnings;
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  warn_unknown(j, kTopKeys, "", warnings);

  if (!j.contains("model")) throw ConfigError("model", "missing required field");
  if (j.at("model").is_object()) warn_unknown(j.at("model"), kModelKeys, "model.", warnings);
  cfg.model = ModelSpec::from_json(j.at("model"));

  if (!j.contains("temperatures")) throw ConfigError("temperatures", "missing required field");
  cfg.temperatures = dedupe(number_list(j.at("temperatures"), "temperatures", true), "temperatures", warnings);

  cfg.sizes = j.contains("sizes") ? dedupe(int_list(j.at("sizes"), "sizes", 1), "sizes", warnings)
                                  : std::vector<int>{cfg.model.n};
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
    if (hilbert_dim(cfg.model.local_dim, cfg.sizes[i], cfg.model.d) > kMaxDim)
      throw ConfigError(j.contains("sizes") ? "sizes[" + std::to_string(i) + "]" : "model.n",
                        "Hilbert-space dimension exceeds " + std::to_string(kMaxDim));

  if (j.contains("cube_lengths"))
    cfg.cube_lengths = dedupe(int_list(j.at("cube_lengths"), "cube_lengths", 1), "cube_lengths", warnings);

  if (j.contains("energy_targets")) {
    const json& e = j.at("energy_targets");
    if (e.is_string()) {
      if (e.get<std::string>() != "u(T)") throw ConfigError("energy_targets", "string form must be \"u(T)\"");
    } else {
      cfg.energy_at_u = false;
      cfg.energy_targets = dedupe(number_list(e, "energy_targets", false), "energy_targets", warnings);
    }
  }
  if (j.contains("deltas")) {
    const json& d = j.at("deltas");
    if (d.is_string()) {
      if (d.get<std::string>() != "paper-window") throw ConfigError("deltas", "string form must be \"paper-window\"");
    } else {
      cfg.paper_window = false;
      cfg.deltas = dedupe(number_list(d, "deltas", true), "deltas", warnings);
    }
  }
  if (j.contains("epsilons")) {
    cfg.epsilons = dedupe(number_list(j.at("epsilons"), "epsilons", true), "epsilons", warnings);
  }
  if (j.contains("C_d")) {
    if (!j.at("C_d").is_number() || !(j.at("C_d").get<double>() >= 1.0))
      throw ConfigError("C_d", "must be a number >= 1");
    cfg.C_d = j.at("C_d").get<double>();
  }
  if (j.contains("correlation")) {
    const json& c = j.at("correlation");
    if (!c.is_object()) throw ConfigError("correlation", "must be an object");
    warn_unknown(c, kCorrelationKeys, "correlation.", warnings);
    if (c.contains("distances"))
      cfg.correlation.distances =
          dedupe(int_list(c.at("distances"), "correlation.distances", 1), "correlation.distances", warnings);
    if (c.contains("restarts")) cfg.correlation.restarts = int_value(c.at("restarts"), "correlation.restarts", 1);
    if (c.contains("seed")) cfg.correlation.seed = seed_value(c.at("seed"), "correlation.seed");
  }
  if (j.contains("haar") && !j.at("haar").is_null()) {
    const json& h = j.at("haar");
    if (!h.is_object()) throw ConfigError("haar", "must be an object");
    warn_unknown(h, kHaarKeys, "haar.", warnings);
    HaarConfig hc;
    if (h.contains("samples")) hc.samples = static_cast<std::size_t>(int_value(h.at("samples"), "haar.samples", 1));
    if (h.contains("seed")) hc.seed = seed_value(h.at("seed"), "haar.seed");
    cfg.haar = hc;
  }
  if (j.contains("tau")) {
    if (!j.at("tau").is_string()) throw ConfigError("tau", "must be \"microcanonical\" or \"canonical\"");
    cfg.tau = j.at("tau").get<std::string>();
    if (cfg.tau != "microcanonical" && cfg.tau != "canonical")
      throw ConfigError("tau", "must be \"microcanonical\" or \"canonical\"");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string() || j.at("output_dir").get<std::string>().empty())
      throw ConfigError("output_dir", "must be a nonempty string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("workers")) cfg.workers = int_value(j.at("workers"), "workers", 0);
  return out;
}

ValidatedConfig validate_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return validate_config(j);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config.to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int resolve_workers(int configured) {
  if (const char* env = std::getenv("ENSEMBLEKIT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  if (configured > 0) return configured;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<CorrelationSample> sample_site_pairs(const GlobalState& rho, const std::vector<int>& distances,
                                                 const CorrelationOptions& options) {
  const LatticeSpec& lat = rho.lattice();
  std::set<int> wanted(distances.begin(), distances.end());
  std::vector<CorrelationSample> out;
  for (int r : wanted)
    for (std::size_t a = 0; a < lat.num_sites(); ++a)
      for (std::size_t b = a + 1; b < lat.num_sites(); ++b) {
        if (lat.manhattan(a, b) != r) continue;
        const auto est = correlation(rho, Region::single(lat, a), Region::single(lat, b), options);
        out.push_back({r, est.upper});
      }
  return out;
}

json RunManifest::to_json() const {
  json t = json::array();
  for (const auto& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  return {{"config_hash", config_hash},
          {"tool_version", tool_version},
          {"seeds", seeds},
          {"wall_clock", t},
          {"outputs", outputs},
          {"points", points},
          {"failed_points", failed}};
}

const std::vector<std::pair<std::string, std::string>>& results_columns() {
  static const std::vector<std::pair<std::string, std::string>> cols = {
      {"n", "lattice edge length"},
      {"N", "number of sites n^d"},
      {"dim", "Hilbert-space dimension D^N"},
      {"T", "temperature"},
      {"l", "cube edge length"},
      {"e", "microcanonical energy per site"},
      {"delta", "window parameter; half-width is delta*sqrt(N)"},
      {"eps", "accuracy parameter epsilon"},
      {"C_d", "Berry-Esseen constant used"},
      {"status", "ok or error"},
      {"error_code", "error class when status is error"},
      {"error_message", "error detail when status is error"},
      {"log_Z", "natural log of the partition function"},
      {"u", "energy density tr(H rho_T)/N"},
      {"c", "specific heat per site"},
      {"s", "entropy per site of rho_T (nats)"},
      {"xi", "certified correlation length of the fitted envelope"},
      {"z", "certified polynomial prefactor exponent (0.5 grid)"},
      {"fit_xi", "regression estimate of xi before inflation"},
      {"fit_z", "regression estimate of z before snapping"},
      {"envelope_ok", "every correlation sample lies under N^z exp(-dist/xi)"},
      {"kolmogorov", "sup distance between the energy CDF of rho_T and its Gaussian"},
      {"be_delta", "Berry-Esseen Delta_{k,xi,z,T}"},
      {"be_rhs", "Delta ln^{2d}(N)/sqrt(N)"},
      {"be_branch", "active branch of the max in Delta (log or variance)"},
      {"window_dim", "number of eigenstates in the microcanonical window"},
      {"local_mean", "average trace distance of tau_C and rho_C over cubes"},
      {"local_max", "largest per-cube trace distance"},
      {"global_trace_distance", "trace distance of the global states"},
      {"thm_bound", "7 sqrt(eps)"},
      {"thm_preconditions_hold", "energy centre, delta window and region-size conditions all hold"},
      {"thm_conclusion_holds", "local_mean <= thm_bound + 1e-9"},
      {"energy_centre_margin", "sqrt(c T^2/N) - |e - u|"},
      {"delta_lower_margin", "delta - 28 Delta sqrt(c T^2) ln^{2d}(N)/sqrt(N)"},
      {"delta_upper_margin", "sqrt(c T^2) - delta"},
      {"delta_window_margin", "sqrt(c T^2) - 28 Delta sqrt(c T^2) ln^{2d}(N)/sqrt(N)"},
      {"region_size_margin", "right minus left side of the region-size condition"},
      {"simplified_budget_holds", "the simplified entropy budget inequality holds at these parameters"},
      {"s_bundle", "exponent bundle s of the Lambert-W form with the Hamiltonian budget"},
      {"relent_bits", "S(tau||rho_T) in bits"},
      {"strong_bound", "(sqrt2 + 2 + sqrt(ln2)) sqrt(2 eps)"},
      {"strong_condition_margin", "right minus left side of the Lambert-W separation condition"},
      {"strong_conclusion_holds", "local_mean <= strong_bound + 1e-9"},
      {"entropy_budget_margin", "right minus left side of the simplified relative-entropy condition"},
      {"relent_lhs", "S(tau||rho_T) bits (microcanonical bound check)"},
      {"relent_rhs", "-S(tau) + log|M| + log(sqrt(N)/(Delta ln^{2d}N) e^{56 sqrt(c) Delta ln^{2d}N})"},
      {"relent_bound_holds", "relent_lhs <= relent_rhs + 1e-9"},
      {"delta0", "smallest admissible window parameter from the proof"},
      {"corollary_entropy_margin", "S(tau) minus the entropy floor of the subspace-state condition"},
      {"haar_samples", "number of Haar samples"},
      {"haar_mean", "mean local average over Haar samples"},
      {"haar_std_error", "standard error of haar_mean"},
      {"haar_fraction_within", "fraction of Haar samples under the probabilistic bound"},
      {"eta", "eta of the Haar statement"},
  };
  return cols;
}

RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir, std::ostream* log) {
  namespace fs = std::filesystem;
  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.tool_version = tool_version();
  manifest.seeds = {{"model", config.model.seed},
                    {"correlation", config.correlation.seed},
                    {"haar", config.haar ? json(config.haar->seed) : json(nullptr)}};
  const int workers = resolve_workers(config.workers);
  Stopwatch watch;

  // Spectra, one per lattice size.
  std::vector<SizeData> sizes(config.sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    SizeData& s = sizes[i];
    s.n = config.sizes[i];
    s.failure = guarded([&] {
      ModelSpec m = config.model;
      m.n = s.n;
      const Hamiltonian h = build_model(m);
      s.N = h.lattice().num_sites();
      s.dim = h.dim();
      s.k = h.locality();
      s.spec = std::make_shared<const SpectralDecomposition>(diagonalize(h));
    });
    if (log) *log << "diagonalized n=" << s.n << (s.failure ? " (failed: " + s.failure->message + ")" : "") << "\n";
  }
  manifest.timings.push_back({"diagonalize", watch.lap()});

  // Thermal data, correlation profile and Berry-Esseen distance per (size, T).
  std::vector<ThermalTask> thermal;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (double T : config.temperatures) {
      ThermalTask t;
      t.size_index = i;
      t.T = T;
      thermal.push_back(std::move(t));
    }
  parallel_for(thermal.size(), workers, [&](std::size_t idx) {
    ThermalTask& t = thermal[idx];
    const SizeData& s = sizes[t.size_index];
    if (s.failure) {
      t.failure = s.failure;
      return;
    }
    t.failure = guarded([&] {
      const GibbsResult g = gibbs(s.spec, t.T);
      t.thermal = g.thermal;
      CorrelationOptions opts;
      opts.restarts = config.correlation.restarts;
      opts.seed = config.correlation.seed;
      t.profile = fit_profile(sample_site_pairs(g.state, config.correlation.distances, opts), s.N);
      t.cdf = spectral_cdf(g.state, *s.spec);
      if (t.cdf->sigma2 > 0.0) t.kolmogorov = kolmogorov_distance(*t.cdf);
    });
  });
  manifest.timings.push_back({"thermal_and_correlations", watch.lap()});

  // Grid points.
  std::vector<PointResult> points;
  for (std::size_t ti = 0; ti < thermal.size(); ++ti)
    for (int l : config.cube_lengths) {
      std::vector<std::optional<double>> energies, deltas;
      if (config.energy_at_u) energies.push_back(std::nullopt);
      for (double e : config.energy_targets) energies.push_back(e);
      if (config.paper_window) deltas.push_back(std::nullopt);
      for (double d : config.deltas) deltas.push_back(d);
      for (const auto& e : energies)
        for (const auto& d : deltas)
          for (double eps : config.epsilons) {
            PointResult p;
            p.size_index = thermal[ti].size_index;
            p.thermal_index = ti;
            p.l = l;
            p.e_target = e;
            p.delta_value = d;
            p.eps = eps;
            points.push_back(std::move(p));
          }
    }

  parallel_for(points.size(), workers, [&](std::size_t idx) {
    PointResult& p = points[idx];
    const ThermalTask& t = thermal[p.thermal_index];
    const SizeData& s = sizes[p.size_index];
    p.e = p.e_target ? *p.e_target : t.thermal.u;
    p.delta = p.delta_value ? *p.delta_value : std::sqrt(t.thermal.c * t.T * t.T);
    if (t.failure) {
      p.failure = t.failure;
      return;
    }
    p.failure = guarded([&] {
      ThermalContext ctx{s.spec, s.k, t.T, t.profile, config.C_d};
      const GibbsResult rho = gibbs(s.spec, t.T);
      const MicrocanonicalResult micro = microcanonical(s.spec, p.e, p.delta);
      const bool canonical = config.tau == "canonical";
      const GlobalState& tau = canonical ? rho.state : micro.state;
      p.theorem = check_theorem1(ctx, p.e, p.delta, p.l, p.eps,
                                 canonical ? std::optional<GlobalState>(rho.state) : std::nullopt);
      p.strong = check_prop_strong(tau, rho.state, p.l, p.eps, t.profile);
      p.global_trace_distance = diagonal_distance(tau, rho.state);
      if (!canonical) {
        p.relent = micro_relent_bound(ctx, micro.state, p.e, p.delta);
        p.corollary = check_corollary_state(ctx, p.e, p.delta, micro.state, p.l, p.eps);
        if (config.haar) p.haar = check_corollary_haar(ctx, p.e, p.delta, config.haar->samples, config.haar->seed, p.l, p.eps);
      }
    });
  });
  manifest.timings.push_back({"grid", watch.lap()});

  // Collect outputs in grid order.
  fs::create_directories(out_dir);
  const auto& cols = results_columns();
  std::ostringstream csv;
  for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c].first;
  csv << "\n";
  json point_list = json::array();
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const PointResult& p = points[idx];
    const ThermalTask& t = thermal[p.thermal_index];
    const SizeData& s = sizes[p.size_index];
    std::map<std::string, std::string> row;
    row["n"] = std::to_string(s.n);
    row["N"] = s.failure ? "" : std::to_string(s.N);
    row["dim"] = s.failure ? "" : std::to_string(s.dim);
    row["T"] = format_number(t.T);
    row["l"] = std::to_string(p.l);
    row["e"] = t.failure && !p.e_target ? "" : format_number(p.e);
    row["delta"] = t.failure && !p.delta_value ? "" : format_number(p.delta);
    row["eps"] = format_number(p.eps);
    row["C_d"] = format_number(config.C_d);
    row["status"] = p.failure ? "error" : "ok";
    row["error_code"] = p.failure ? p.failure->code : "";
    row["error_message"] = p.failure ? p.failure->message : "";
    if (!t.failure) {
      row["log_Z"] = format_number(t.thermal.log_Z);
      row["u"] = format_number(t.thermal.u);
      row["c"] = format_number(t.thermal.c);
      row["s"] = format_number(t.thermal.s);
      row["xi"] = format_number(t.profile.xi);
      row["z"] = format_number(t.profile.z);
      row["fit_xi"] = format_number(t.profile.fit_xi);
      row["fit_z"] = format_number(t.profile.fit_z);
      row["envelope_ok"] = bool_text(t.profile.envelope_ok);
      row["kolmogorov"] = format_number(t.kolmogorov);
    }
    if (p.theorem) {
      const auto& r = *p.theorem;
      if (r.be) {
        row["be_delta"] = format_number(r.be->value);
        row["be_rhs"] = format_number(r.be->rhs);
        row["be_branch"] = r.be->branch;
      }
      row["window_dim"] = std::to_string(r.window_dim);
      row["local_mean"] = format_number(r.measured);
      row["local_max"] = format_number(r.measured_max);
      row["global_trace_distance"] = format_number(p.global_trace_distance);
      row["thm_bound"] = format_number(r.paper_bound);
      row["thm_preconditions_hold"] = bool_text(r.preconditions_hold);
      row["thm_conclusion_holds"] = bool_text(r.conclusion_holds);
      row["energy_centre_margin"] = format_number(margin_of(r.preconditions, "energy_centre"));
      row["delta_lower_margin"] = format_number(margin_of(r.preconditions, "delta_lower"));
      row["delta_upper_margin"] = format_number(margin_of(r.preconditions, "delta_upper"));
      row["delta_window_margin"] = format_number(margin_of(r.preconditions, "delta_window_nonempty"));
      row["region_size_margin"] = format_number(margin_of(r.preconditions, "region_size"));
      if (const Condition* c = find_condition(r.diagnostics, "simplified_budget"))
        row["simplified_budget_holds"] = bool_text(c->holds);
      row["s_bundle"] = format_number(r.s_bundle);
    }
    if (p.strong) {
      const auto& r = *p.strong;
      row["relent_bits"] = format_number(r.relative_entropy_bits);
      row["strong_bound"] = format_number(r.paper_bound);
      row["strong_condition_margin"] = format_number(margin_of(r.preconditions, "lambert_separation"));
      row["strong_conclusion_holds"] = bool_text(r.conclusion_holds);
      row["entropy_budget_margin"] = format_number(margin_of(r.diagnostics, "entropy_budget"));
    }
    if (p.relent) {
      row["relent_lhs"] = format_number(p.relent->lhs);
      row["relent_rhs"] = format_number(p.relent->rhs);
      row["relent_bound_holds"] = bool_text(p.relent->bound_holds);
      row["delta0"] = format_number(p.relent->delta0);
    }
    if (p.corollary) row["corollary_entropy_margin"] = format_number(margin_of(p.corollary->report.preconditions, "entropy"));
    if (p.haar) {
      row["haar_samples"] = std::to_string(p.haar->samples);
      row["haar_mean"] = format_number(p.haar->sample_mean);
      row["haar_std_error"] = format_number(p.haar->sample_std_error);
      row["haar_fraction_within"] = format_number(p.haar->fraction_within);
      row["eta"] = format_number(p.haar->eta);
    }
    for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << csv_escape(row[cols[c].first]);
    csv << "\n";

    json pj = {{"index", idx},
               {"n", s.n},
               {"T", num(t.T)},
               {"l", p.l},
               {"e", num(p.e)},
               {"delta", num(p.delta)},
               {"eps", num(p.eps)},
               {"status", p.failure ? "error" : "ok"},
               {"error", failure_json(p.failure)}};
    pj["theorem"] = p.theorem ? to_json(*p.theorem) : json(nullptr);
    pj["strong"] = p.strong ? to_json(*p.strong) : json(nullptr);
    pj["relative_entropy_bound"] = p.relent ? to_json(*p.relent) : json(nullptr);
    pj["subspace_state"] = p.corollary ? to_json(*p.corollary) : json(nullptr);
    pj["haar"] = p.haar ? to_json(*p.haar) : json(nullptr);
    pj["global_trace_distance"] = p.theorem ? num(p.global_trace_distance) : json(nullptr);
    point_list.push_back(std::move(pj));
    if (p.failure) ++manifest.failed;
  }
  manifest.points = points.size();

  json size_list = json::array();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const SizeData& s = sizes[i];
    json temps = json::array();
    for (const auto& t : thermal) {
      if (t.size_index != i) continue;
      json tj = {{"T", num(t.T)}, {"error", failure_json(t.failure)}};
      if (!t.failure) {
        tj["thermal"] = thermal_json(t.thermal);
        tj["correlation_profile"] = profile_json(t.profile);
        tj["kolmogorov_distance"] = num(t.kolmogorov);
        tj["energy_distribution"] = {{"mu", num(t.cdf->mu)}, {"sigma2", num(t.cdf->sigma2)},
                                     {"distinct_levels", t.cdf->jump_points.size()}};
      }
      temps.push_back(std::move(tj));
    }
    size_list.push_back({{"n", s.n},
                         {"N", s.N},
                         {"dim", s.dim},
                         {"locality", s.k},
                         {"error", failure_json(s.failure)},
                         {"temperatures", temps}});
  }
  const json results = {{"config", config.to_json()},
                        {"config_hash", manifest.config_hash},
                        {"tool_version", manifest.tool_version},
                        {"sizes", size_list},
                        {"points", point_list}};

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    f << text;
    if (!f) throw Error("io", "cannot write " + (fs::path(out_dir) / name).string());
    manifest.outputs.push_back(name);
  };
  write("results.csv", csv.str());
  write("results.json", results.dump(2) + "\n");

  std::ostringstream dict;
  dict << "# results.csv columns\n\nOne row per grid point, in grid order (size, temperature, cube length, energy, "
          "delta, eps). Empty cells mean the value was not computed for that row.\n\n| column | meaning |\n|---|---|\n";
  for (const auto& [name, what] : cols) dict << "| " << name << " | " << what << " |\n";
  write("data_dictionary.md", dict.str());

  // Plots.
  {
    const ThermalTask* chosen = nullptr;
    for (const auto& t : thermal)
      if (!t.failure && t.cdf && t.cdf->sigma2 > 0.0 &&
          (!chosen || sizes[t.size_index].N > sizes[chosen->size_index].N))
        chosen = &t;
    std::vector<svg::Series> series;
    std::string title = "energy distribution of the canonical state";
    if (chosen) {
      const SpectralCDF& cdf = *chosen->cdf;
      svg::Series F{"F (spectral CDF)", {}, {}, true, false};
      double acc = 0.0;
      const double sd = std::sqrt(cdf.sigma2);
      F.x.push_back(std::min(cdf.jump_points.front(), cdf.mu - 4 * sd));
      F.y.push_back(0.0);
      for (std::size_t i = 0; i < cdf.jump_points.size(); ++i) {
        acc += cdf.masses[i];
        F.x.push_back(cdf.jump_points[i]);
        F.y.push_back(std::min(1.0, acc));
      }
      F.x.push_back(std::max(cdf.jump_points.back(), cdf.mu + 4 * sd));
      F.y.push_back(1.0);
      svg::Series G{"G (Gaussian)", {}, {}, false, false};
      for (int i = 0; i <= 400; ++i) {
        const double x = F.x.front() + (F.x.back() - F.x.front()) * i / 400.0;
        G.x.push_back(x);
        G.y.push_back(gaussian_cdf(x, cdf.mu, cdf.sigma2));
      }
      series = {F, G};
      char buf[160];
      std::snprintf(buf, sizeof buf, "energy CDF vs Gaussian, N=%zu, T=%g, sup|F-G|=%.4g", sizes[chosen->size_index].N,
                    chosen->T, chosen->kolmogorov);
      title = buf;
    }
    write("cdf_vs_gaussian.svg", svg::line_plot(title, "energy E", "cumulative probability", series));
  }
  {
    std::vector<svg::Series> series;
    const PointResult* first = nullptr;
    for (const auto& p : points)
      if (!p.failure) {
        first = &p;
        break;
      }
    std::string title = "local and global distance vs N";
    if (first) {
      svg::Series local{"local average", {}, {}, false, true}, global{"global trace distance", {}, {}, false, true},
          bound{"7 sqrt(eps)", {}, {}, false, false};
      const double T = thermal[first->thermal_index].T;
      for (const auto& p : points) {
        if (p.failure || thermal[p.thermal_index].T != T || p.l != first->l || p.eps != first->eps ||
            p.e_target != first->e_target || p.delta_value != first->delta_value)
          continue;
        const double N = static_cast<double>(sizes[p.size_index].N);
        local.x.push_back(N);
        local.y.push_back(p.theorem->measured);
        global.x.push_back(N);
        global.y.push_back(p.global_trace_distance);
        bound.x.push_back(N);
        bound.y.push_back(std::min(2.0, p.theorem->paper_bound));
      }
      series = {local, global, bound};
      char buf[160];
      std::snprintf(buf, sizeof buf, "distance vs N (T=%g, l=%d, eps=%g)", T, first->l, first->eps);
      title = buf;
    }
    write("distance_vs_N.svg", svg::line_plot(title, "N", "trace distance", series));
  }
  {
    const std::vector<std::string> header = {"N", "T", "l", "eps", "energy centre", "delta lower", "delta upper",
                                             "region size", "separation", "measured <= bound"};
    std::vector<std::vector<svg::Cell>> rows;
    auto cell = [](double margin) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", margin);
      return svg::Cell{buf, std::isnan(margin) ? 0 : (margin >= 0 ? 1 : -1)};
    };
    auto fmt = [](double x) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", x);
      return std::string(buf);
    };
    for (const auto& p : points) {
      std::vector<svg::Cell> row = {{std::to_string(sizes[p.size_index].N), 0},
                                    {fmt(thermal[p.thermal_index].T), 0},
                                    {std::to_string(p.l), 0},
                                    {fmt(p.eps), 0}};
      if (p.failure) {
        row.push_back({"error: " + p.failure->code, -1});
      } else {
        const auto& pre = p.theorem->preconditions;
        row.push_back(cell(margin_of(pre, "energy_centre")));
        row.push_back(cell(margin_of(pre, "delta_lower")));
        row.push_back(cell(margin_of(pre, "delta_upper")));
        row.push_back(cell(margin_of(pre, "region_size")));
        row.push_back(cell(margin_of(p.strong->preconditions, "lambert_separation")));
        row.push_back({p.theorem->conclusion_holds ? "yes" : "no", p.theorem->conclusion_holds ? 1 : -1});
      }
      rows.push_back(std::move(row));
    }
    write("margin_table.svg", svg::table("precondition margins (rhs - lhs)", header, rows));
  }
  manifest.timings.push_back({"write", watch.lap()});
  manifest.outputs.push_back("manifest.json");
  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  mf << manifest.to_json().dump(2) << "\n";
  return manifest;
}

}  // namespace ensemblekit
