#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "batchens/simulator.hpp"

namespace batchens {

inline constexpr const char* kLibraryVersion = "0.1.0";

// A fully resolved experiment description. Parsed from a flat key=value file
// and/or command-line flags; flags override file values. The saved echo of a
// config reloads to an identical run.
struct ExperimentConfig {
  std::string preset = "testcase1";        // testcase1..testcase5 or custom
  std::vector<std::string> policy_names;   // empty = default set
  std::int64_t horizon = 2000;
  int simulations = 100;
  std::uint64_t base_seed = 1;
  double delta = 0.05;
  std::string out_path = "results.csv";
  int parallel = 1;
  bool efficient_estimator = false;        // switches plain ensemble policies
  double warmup_sigma = 0.0;               // 0 disables the warmup phase
  double bernoullify_scale = 0.0;          // 0 disables the wrapper
  std::vector<std::string> custom_arms;    // preset = custom only

  std::vector<PolicyConfig> resolve_policies() const;
  BanditSpec resolve_bandit() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parse one config file (UTF-8, `key = value` lines, `#` comments).
// Throws std::runtime_error with a distinct message per failure class:
// "config parse error", "unknown preset", "unknown key",
// "parameter out of range".
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Serialize in the same grammar load_config_file accepts.
std::string config_to_text(const ExperimentConfig& config);

// Validation shared by file and flag paths; throws on out-of-range values.
void validate_config(const ExperimentConfig& config);

// Arm spec grammar: kind:params, e.g. "bernoulli:0.25",
// "gaussian:0.5:1.0", "exponential:2.0", "scaled-bernoulli:4.0:1.0",
// "uniform:0.0:1.0".
Arm parse_arm(const std::string& text);

// Policy spec grammar: name[:param], e.g. "ensemble", "ensemble-efficient",
// "ensemble-fixed", "ensemble-fixed:40", "ucb", "ucb:2.0", "ucb-v:1.0",
// "kl-ucb", "mars", "mars:0.5".
PolicyConfig parse_policy(const std::string& text, const ExperimentConfig& config);

// The six policies the experiment presets compare by default.
std::vector<std::string> default_policy_names();

// Writes `policy,t,mean_regret,std_regret` rows, 17 significant digits,
// LF endings.
void write_experiment_csv(std::ostream& os, const ExperimentResult& result);
void write_experiment_csv_file(const std::string& path, const ExperimentResult& result);

// Config echo + seed and version comments; reloadable as a config file.
void write_metadata_file(const std::string& path, const ExperimentConfig& config);

// Minimal static SVG chart of mean regret per policy (no interactivity).
void write_chart_svg(const std::string& path, const ExperimentResult& result);

}  // namespace batchens
