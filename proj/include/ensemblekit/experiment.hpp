#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemblekit/correlations.hpp"
#include "ensemblekit/operators.hpp"
#include "ensemblekit/states.hpp"

namespace ensemblekit {

struct CorrelationConfig {
  std::vector<int> distances{1, 2, 3};
  int restarts = 16;
  std::uint64_t seed = 0;
};

struct HaarConfig {
  std::size_t samples = 20;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<int> sizes;                // lattice edge lengths n; defaults to {model.n}
  std::vector<double> temperatures;
  std::vector<int> cube_lengths{1};
  bool energy_at_u = true;               // "u(T)"
  std::vector<double> energy_targets;    // energy per site, when not "u(T)"
  bool paper_window = true;              // delta = sqrt(c(T) T^2)
  std::vector<double> deltas;
  std::vector<double> epsilons{0.1};
  double C_d = 1.0;
  CorrelationConfig correlation;
  std::optional<HaarConfig> haar;
  std::string tau = "microcanonical";    // or "canonical" to substitute rho_T
  std::string output_dir = "results";
  int workers = 0;                       // 0: hardware concurrency

  nlohmann::json to_json() const;
};

struct ValidatedConfig {
  ExperimentConfig config;
  std::vector<std::string> warnings;
};

// Throws ConfigError naming the offending field.
ValidatedConfig validate_config(const nlohmann::json& j);
ValidatedConfig validate_config_file(const std::string& path);

// FNV-1a over the normalized config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// ENSEMBLEKIT_WORKERS wins over the configured count; result >= 1.
int resolve_workers(int configured);

// Single-site pairs at each requested distance, valued by cor-upper.
std::vector<CorrelationSample> sample_site_pairs(const GlobalState& rho, const std::vector<int>& distances,
                                                 const CorrelationOptions& options);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  nlohmann::json seeds;
  std::vector<StageTiming> timings;
  std::vector<std::string> outputs;
  std::size_t points = 0;
  std::size_t failed = 0;

  nlohmann::json to_json() const;
};

// Runs the full grid and writes results.csv, results.json, manifest.json,
// data_dictionary.md and the SVG plots into `out_dir`.
RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir, std::ostream* log = nullptr);

// Column names of results.csv, in order, with their descriptions.
const std::vector<std::pair<std::string, std::string>>& results_columns();

const char* tool_version();

// %.17g, with inf/-inf/nan spelled out.
std::string format_number(double x);

}  // namespace ensemblekit
