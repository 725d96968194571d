// Command-line front end: one subcommand per module plus the sweep runner.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ensemblekit/berry_esseen.hpp"
#include "ensemblekit/correlations.hpp"
#include "ensemblekit/equivalence.hpp"
#include "ensemblekit/error.hpp"
#include "ensemblekit/experiment.hpp"
#include "ensemblekit/operators.hpp"
#include "ensemblekit/quantinfo.hpp"
#include "ensemblekit/states.hpp"
#include "ensemblekit/substate.hpp"

namespace ek = ensemblekit;
using nlohmann::json;

namespace {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  json doc = json::object();
  std::vector<Table> tables;
};

std::string num(double x) { return ek::format_number(x); }

json cell_json(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end && *end == '\0' && std::isfinite(v)) return v;
  return s;
}

std::string csv_text(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << "\n";
  }
  return os.str();
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t c = 0; c < t.columns.size() && c < r.size(); ++c) o[t.columns[c]] = cell_json(r[c]);
    rows.push_back(std::move(o));
  }
  return rows;
}

void emit(const Output& out, const std::string& command, const std::string& format, const std::string& dir) {
  namespace fs = std::filesystem;
  if (format == "json") {
    json doc = out.doc;
    for (const auto& t : out.tables)
      if (!doc.contains(t.name)) doc[t.name] = table_json(t);
    const std::string text = doc.dump(2) + "\n";
    if (dir.empty()) {
      std::cout << text;
    } else {
      fs::create_directories(dir);
      std::ofstream(fs::path(dir) / (command + ".json")) << text;
    }
    return;
  }
  if (dir.empty()) {
    for (std::size_t i = 0; i < out.tables.size(); ++i) std::cout << (i ? "\n" : "") << csv_text(out.tables[i]);
    return;
  }
  fs::create_directories(dir);
  for (const auto& t : out.tables) {
    const std::string file = t.name == command ? command + ".csv" : command + "_" + t.name + ".csv";
    std::ofstream(fs::path(dir) / file) << csv_text(t);
  }
}

// Options shared by every subcommand.
struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  // model overrides
  std::optional<std::string> family;
  std::optional<int> n, d, local_dim, k;
};

void add_common(CLI::App* app, Common& c, bool model_flags = true) {
  app->add_option("--config", c.config, "JSON config file");
  app->add_option("--out", c.out, "output directory (default: stdout)");
  app->add_option("--seed", c.seed, "seed for the randomized parts");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  if (!model_flags) return;
  app->add_option("--family", c.family, "model family");
  app->add_option("--n", c.n, "lattice edge length");
  app->add_option("--d", c.d, "lattice dimension");
  app->add_option("--local-dim", c.local_dim, "local Hilbert-space dimension D");
  app->add_option("--k", c.k, "locality");
}

// Config file contents as seen by the single-module subcommands.
struct Loaded {
  ek::ExperimentConfig cfg;
  bool has_temperatures = false;
};

Loaded load(const Common& c) {
  Loaded L;
  json j = json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw ek::ConfigError("config", "cannot open '" + c.config + "'");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ek::ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ek::ConfigError("config", "top level must be an object");
  }
  if (!j.contains("model")) j["model"] = json::object();
  L.has_temperatures = j.contains("temperatures");
  if (!L.has_temperatures) j["temperatures"] = {1.0};
  json& m = j["model"];
  if (m.is_object()) {
    if (c.family) m["family"] = *c.family;
    if (c.n) m["n"] = *c.n;
    if (c.d) m["d"] = *c.d;
    if (c.local_dim) m["local_dim"] = *c.local_dim;
    if (c.k) m["k"] = *c.k;
  }
  auto v = ek::validate_config(j);
  for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
  L.cfg = v.config;
  return L;
}

std::shared_ptr<const ek::SpectralDecomposition> spectrum_of(const ek::ModelSpec& m, int* locality = nullptr) {
  const ek::Hamiltonian h = ek::build_model(m);
  if (locality) *locality = h.locality();
  return std::make_shared<const ek::SpectralDecomposition>(ek::diagonalize(h));
}

std::vector<double> temperatures(const Loaded& L, const std::vector<double>& flag) {
  if (!flag.empty()) return flag;
  if (L.has_temperatures) return L.cfg.temperatures;
  throw ek::ConfigError("temperatures", "give --T or a config with temperatures");
}

ek::CorrelationProfile profile_for(const ek::GlobalState& rho, const ek::CorrelationConfig& cc) {
  ek::CorrelationOptions opts;
  opts.restarts = cc.restarts;
  opts.seed = cc.seed;
  return ek::fit_profile(ek::sample_site_pairs(rho, cc.distances, opts), rho.lattice().num_sites());
}

// Energy and window parameter: flags first, then the config, then u(T) and sqrt(c T^2).
std::pair<double, double> energy_window(const Loaded& L, const ek::ThermalData& th, std::optional<double> e,
                                        std::optional<double> delta) {
  double ev = e ? *e : (!L.cfg.energy_at_u ? L.cfg.energy_targets.front() : th.u);
  double dv = delta ? *delta : (!L.cfg.paper_window ? L.cfg.deltas.front() : std::sqrt(th.c * th.T * th.T));
  return {ev, dv};
}

// Random instances for the substate property checks.
ek::DensityMatrix random_state(const ek::Region& r, int D, std::mt19937_64& rng) {
  const auto dim = static_cast<std::size_t>(std::llround(std::pow(D, r.size())));
  std::uniform_int_distribution<std::size_t> rank(1, dim);
  return ek::random_density(r, D, rng, rank(rng));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ensemblekit: canonical versus microcanonical ensembles by exact diagonalization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ek::tool_version());

  Common c;

  auto* spectrum = app.add_subcommand("spectrum", "energy eigenvalues of the configured model");
  add_common(spectrum, c);

  std::vector<double> T_flag;
  auto* thermal = app.add_subcommand("thermal", "T, Z, u, c, s of the Gibbs state");
  add_common(thermal, c);
  thermal->add_option("--T", T_flag, "temperatures");

  std::optional<double> e_flag, delta_flag;
  auto* micro = app.add_subcommand("micro", "microcanonical window membership");
  add_common(micro, c);
  micro->add_option("--T", T_flag, "temperature used for u(T) and the default window");
  micro->add_option("--e", e_flag, "energy per site");
  micro->add_option("--delta", delta_flag, "window parameter (half-width delta*sqrt(N))");

  std::vector<int> distances_flag;
  std::optional<int> restarts_flag;
  auto* corr = app.add_subcommand("correlations", "site-pair correlations of the Gibbs state and envelope fit");
  add_common(corr, c);
  corr->add_option("--T", T_flag, "temperatures");
  corr->add_option("--distances", distances_flag, "pair distances");
  corr->add_option("--restarts", restarts_flag, "ascent restarts");

  auto* be = app.add_subcommand("berry-esseen", "energy CDF of the Gibbs state against its Gaussian");
  add_common(be, c);
  be->add_option("--T", T_flag, "temperatures");

  std::optional<int> l_flag;
  std::optional<double> eps_flag, cd_flag;
  auto* eq = app.add_subcommand("equivalence", "all equivalence checks at one parameter point");
  add_common(eq, c);
  eq->add_option("--T", T_flag, "temperature");
  eq->add_option("--e", e_flag, "energy per site");
  eq->add_option("--delta", delta_flag, "window parameter");
  eq->add_option("--l", l_flag, "cube edge length");
  eq->add_option("--eps", eps_flag, "epsilon");
  eq->add_option("--C-d", cd_flag, "Berry-Esseen constant");
  eq->add_option("--distances", distances_flag, "correlation distances");

  std::size_t samples = 300;
  auto* sub = app.add_subcommand("substate-check", "random verification of the substate construction and transfer");
  add_common(sub, c, false);
  sub->add_option("--samples", samples, "instances of each kind");

  std::size_t haar_samples = 0;
  auto* haar = app.add_subcommand("haar", "local distances of Haar states in the microcanonical window");
  add_common(haar, c);
  haar->add_option("--T", T_flag, "temperature");
  haar->add_option("--e", e_flag, "energy per site");
  haar->add_option("--delta", delta_flag, "window parameter");
  haar->add_option("--l", l_flag, "cube edge length");
  haar->add_option("--eps", eps_flag, "epsilon");
  haar->add_option("--samples", haar_samples, "number of samples");

  auto* run = app.add_subcommand("run", "full parameter sweep from a config");
  add_common(run, c, false);
  run->add_option("config_file", c.config, "JSON config (same as --config)");

  auto* validate = app.add_subcommand("validate", "check a config and print it with defaults filled");
  add_common(validate, c, false);
  validate->add_option("config_file", c.config, "JSON config (same as --config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Output out;
    std::string name;
    int status = 0;

    if (*spectrum) {
      name = "spectrum";
      const Loaded L = load(c);
      const auto spec = spectrum_of(L.cfg.model);
      Table t{"spectrum", {"index", "energy"}, {}};
      for (Eigen::Index i = 0; i < spec->energies.size(); ++i) t.rows.push_back({std::to_string(i), num(spec->energies(i))});
      out.doc["model"] = L.cfg.model.to_json();
      out.tables.push_back(t);
    } else if (*thermal) {
      name = "thermal";
      const Loaded L = load(c);
      const auto spec = spectrum_of(L.cfg.model);
      Table t{"thermal", {"T", "Z", "log_Z", "u", "c", "s"}, {}};
      for (double T : temperatures(L, T_flag)) {
        const auto th = ek::gibbs(spec, T).thermal;
        t.rows.push_back({num(T), num(th.Z), num(th.log_Z), num(th.u), num(th.c), num(th.s)});
      }
      out.tables.push_back(t);
    } else if (*micro) {
      name = "micro";
      const Loaded L = load(c);
      const auto spec = spectrum_of(L.cfg.model);
      std::optional<ek::ThermalData> th;
      if (!T_flag.empty() || L.has_temperatures) th = ek::gibbs(spec, temperatures(L, T_flag).front()).thermal;
      if ((!e_flag && L.cfg.energy_at_u) || (!delta_flag && L.cfg.paper_window))
        if (!th) throw ek::ConfigError("T", "u(T) or the default window needs a temperature");
      const auto [e, delta] = th ? energy_window(L, *th, e_flag, delta_flag)
                                 : std::pair<double, double>{e_flag ? *e_flag : L.cfg.energy_targets.front(),
                                                             delta_flag ? *delta_flag : L.cfg.deltas.front()};
      const auto win = ek::window_members(*spec, e, delta);
      Table members{"members", {"index", "energy"}, {}};
      for (std::size_t nu : win.members)
        members.rows.push_back({std::to_string(nu), num(spec->energies(static_cast<Eigen::Index>(nu)))});
      Table summary{"summary", {"e", "delta", "half_width", "dim", "log_Z_window"}, {}};
      summary.rows.push_back({num(e), num(delta), num(win.half_width), std::to_string(win.dim()),
                              th ? num(ek::restricted_log_partition(*spec, th->T, e, delta)) : ""});
      out.tables = {summary, members};
    } else if (*corr) {
      name = "correlations";
      const Loaded L = load(c);
      const auto spec = spectrum_of(L.cfg.model);
      ek::CorrelationConfig cc = L.cfg.correlation;
      if (!distances_flag.empty()) cc.distances = distances_flag;
      if (restarts_flag) cc.restarts = *restarts_flag;
      if (c.seed) cc.seed = *c.seed;
      Table samples_t{"samples", {"T", "distance", "cor_upper"}, {}};
      Table fit{"profile", {"T", "xi", "z", "fit_xi", "fit_z", "envelope_ok"}, {}};
      for (double T : temperatures(L, T_flag)) {
        const auto g = ek::gibbs(spec, T);
        const auto prof = profile_for(g.state, cc);
        for (const auto& s : prof.samples) samples_t.rows.push_back({num(T), std::to_string(s.distance), num(s.value)});
        fit.rows.push_back({num(T), num(prof.xi), num(prof.z), num(prof.fit_xi), num(prof.fit_z),
                            prof.envelope_ok ? "true" : "false"});
      }
      out.tables = {fit, samples_t};
    } else if (*be) {
      name = "berry-esseen";
      const Loaded L = load(c);
      const auto spec = spectrum_of(L.cfg.model);
      Table jumps{"jumps", {"T", "energy", "mass", "F_left", "F", "G"}, {}};
      Table summary{"summary", {"T", "mu", "sigma2", "kolmogorov_distance"}, {}};
      for (double T : temperatures(L, T_flag)) {
        const auto cdf = ek::spectral_cdf(ek::gibbs(spec, T).state, *spec);
        double acc = 0.0;
        for (std::size_t i = 0; i < cdf.jump_points.size(); ++i) {
          const double left = acc;
          acc += cdf.masses[i];
          jumps.rows.push_back({num(T), num(cdf.jump_points[i]), num(cdf.masses[i]), num(left), num(std::min(1.0, acc)),
                                num(ek::gaussian_cdf(cdf.jump_points[i], cdf.mu, cdf.sigma2))});
        }
        summary.rows.push_back({num(T), num(cdf.mu), num(cdf.sigma2), num(ek::kolmogorov_distance(cdf))});
      }
      out.tables = {summary, jumps};
    } else if (*eq || *haar) {
      name = *eq ? "equivalence" : "haar";
      const Loaded L = load(c);
      int k = 1;
      const auto spec = spectrum_of(L.cfg.model, &k);
      const double T = temperatures(L, T_flag).front();
      const auto g = ek::gibbs(spec, T);
      ek::CorrelationConfig cc = L.cfg.correlation;
      if (!distances_flag.empty()) cc.distances = distances_flag;
      if (c.seed) cc.seed = *c.seed;
      const ek::ThermalContext ctx{spec, k, T, profile_for(g.state, cc), cd_flag ? *cd_flag : L.cfg.C_d};
      const auto [e, delta] = energy_window(L, g.thermal, e_flag, delta_flag);
      const int l = l_flag ? *l_flag : L.cfg.cube_lengths.front();
      const double eps = eps_flag ? *eps_flag : L.cfg.epsilons.front();
      if (*eq) {
        const auto micro_state = ek::microcanonical(spec, e, delta);
        const auto thm = ek::check_theorem1(ctx, e, delta, l, eps);
        const auto strong = ek::check_prop_strong(micro_state.state, g.state, l, eps, ctx.profile);
        const auto relent = ek::micro_relent_bound(ctx, micro_state.state, e, delta);
        const auto cor = ek::check_corollary_state(ctx, e, delta, micro_state.state, l, eps);
        out.doc = {{"theorem", ek::to_json(thm)},
                   {"strong", ek::to_json(strong)},
                   {"relative_entropy_bound", ek::to_json(relent)},
                   {"subspace_state", ek::to_json(cor)}};
        Table conds{"conditions", {"check", "name", "lhs", "rhs", "margin", "holds"}, {}};
        auto add = [&](const std::string& check, const std::vector<ek::Condition>& cs) {
          for (const auto& x : cs)
            conds.rows.push_back({check, x.name, num(x.lhs), num(x.rhs), num(x.margin()), x.holds ? "true" : "false"});
        };
        add("theorem", thm.preconditions);
        add("theorem_diagnostic", thm.diagnostics);
        add("strong", strong.preconditions);
        add("strong_diagnostic", strong.diagnostics);
        add("relative_entropy_bound", relent.preconditions);
        add("subspace_state", cor.report.preconditions);
        Table summary{"summary",
                      {"T", "e", "delta", "l", "eps", "window_dim", "measured", "thm_bound", "thm_conclusion",
                       "strong_bound", "strong_conclusion", "relent_lhs", "relent_rhs", "relent_bound_holds"},
                      {}};
        summary.rows.push_back({num(T), num(e), num(delta), std::to_string(l), num(eps), std::to_string(thm.window_dim),
                                num(thm.measured), num(thm.paper_bound), thm.conclusion_holds ? "true" : "false",
                                num(strong.paper_bound), strong.conclusion_holds ? "true" : "false", num(relent.lhs),
                                num(relent.rhs), relent.bound_holds ? "true" : "false"});
        out.tables = {summary, conds};
      } else {
        const std::size_t count = haar_samples ? haar_samples : (L.cfg.haar ? L.cfg.haar->samples : 20);
        const std::uint64_t seed = c.seed ? *c.seed : (L.cfg.haar ? L.cfg.haar->seed : 0);
        const auto rep = ek::check_corollary_haar(ctx, e, delta, count, seed, l, eps);
        out.doc = ek::to_json(rep);
        Table per{"samples", {"sample", "seed", "local_mean"}, {}};
        for (std::size_t i = 0; i < rep.sample_values.size(); ++i)
          per.rows.push_back({std::to_string(i), std::to_string(seed + i), num(rep.sample_values[i])});
        Table summary{"summary",
                      {"window_dim", "window_value", "sample_mean", "sample_std_error", "eta", "bound",
                       "fraction_within", "success_probability"},
                      {}};
        summary.rows.push_back({std::to_string(rep.report.window_dim), num(rep.window_value), num(rep.sample_mean),
                                num(rep.sample_std_error), num(rep.eta), num(rep.report.paper_bound),
                                num(rep.fraction_within), num(rep.success_probability)});
        out.tables = {summary, per};
      }
    } else if (*sub) {
      name = "substate-check";
      const std::uint64_t seed = c.seed.value_or(0);
      std::mt19937_64 rng(seed);
      const ek::LatticeSpec lat(3, 1);
      const double eps_grid[] = {0.1, 0.3, 0.5};
      Table rows{"substate-check",
                 {"kind", "index", "dim", "parameter", "achieved_smax", "smax_bound", "distance", "distance_bound",
                  "verified"},
                 {}};
      std::size_t failures = 0;
      for (std::size_t i = 0; i < samples; ++i) {
        const int D = (i % 2 == 0) ? 2 : 4;
        const ek::Region r = ek::Region::single(lat, 0);
        const auto tau = random_state(r, D, rng);
        const auto rho = ek::random_density(r, D, rng);
        const double eps = eps_grid[i % 3];
        bool ok = false;
        try {
          const auto w = ek::substate_smooth(tau, rho, eps);
          ok = w.verified();
          rows.rows.push_back({"smooth", std::to_string(i), std::to_string(D), num(eps), num(w.achieved_smax),
                               num(w.lambda_bound), num(w.distance), num(w.distance_bound), ok ? "true" : "false"});
        } catch (const ek::SubstateConstructionFailure& e) {
          rows.rows.push_back({"smooth", std::to_string(i), std::to_string(D), num(eps), "", "", "", "", "false"});
          std::cerr << e.what() << "\n";
        }
        if (!ok) ++failures;
      }
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < samples; ++i) {
        const int sites = 1 + static_cast<int>(i % 3);
        std::vector<std::size_t> ids;
        for (int s = 0; s < sites; ++s) ids.push_back(static_cast<std::size_t>(s));
        const ek::Region r(lat, ids);
        const int D = 2;
        const auto rho = ek::random_density(r, D, rng);
        const auto pi_tilde = ek::random_density(r, D, rng);
        const double lambda = ek::max_relative_entropy(pi_tilde, rho).value;
        const auto sigma = ek::random_density(r, D, rng);
        const double spread = ek::trace_distance(sigma, rho);
        const double kappa_target = 0.9 * unit(rng);
        const double t = std::min(1.0, kappa_target / (std::exp2(lambda) * spread));
        const ek::DensityMatrix rho_tilde(r, D, (1.0 - t) * rho.matrix() + t * sigma.matrix());
        const auto w = ek::datta_renner_transfer(pi_tilde, rho, rho_tilde, lambda);
        const bool ok = w.verified() && w.checks.hold();
        rows.rows.push_back({"transfer", std::to_string(i), std::to_string(rho.dim()), num(w.kappa),
                             num(w.achieved_smax), num(w.lambda_bound), num(w.distance), num(w.distance_bound),
                             ok ? "true" : "false"});
        if (!ok) ++failures;
      }
      out.doc = {{"samples", samples}, {"seed", seed}, {"failures", failures}};
      out.tables = {rows};
      status = failures == 0 ? 0 : 1;
    } else if (*run) {
      name = "run";
      if (c.config.empty()) throw ek::ConfigError("config", "run needs a config file");
      auto v = ek::validate_config_file(c.config);
      for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
      if (c.seed) {
        v.config.model.seed = *c.seed;
        v.config.correlation.seed = *c.seed;
        if (v.config.haar) v.config.haar->seed = *c.seed;
      }
      const std::string dir = c.out.empty() ? v.config.output_dir : c.out;
      const auto manifest = ek::run_experiment(v.config, dir, &std::cerr);
      std::cerr << "wrote " << manifest.points << " grid points (" << manifest.failed << " failed) to " << dir << "\n";
      return manifest.points > 0 && manifest.failed == manifest.points ? 1 : 0;
    } else if (*validate) {
      if (c.config.empty()) throw ek::ConfigError("config", "validate needs a config file");
      const auto v = ek::validate_config_file(c.config);
      for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << v.config.to_json().dump(2) << "\n";
      return 0;
    }
    emit(out, name, c.format, c.out);
    return status;
  } catch (const ek::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ek::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
