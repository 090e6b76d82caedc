#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ergolab::runner {

enum class Experiment {
  fourier_dim,
  mean_ergodic,
  zd_bound,
  pointwise,
  maximal,
  curve,
  salem,
  transfer
};

const char* experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);
std::vector<std::string> experiment_names();

struct ExperimentConfig {
  Experiment experiment = Experiment::fourier_dim;
  std::uint64_t seed = 0;
  int workers = 0;         // 0 = ERGOLAB_WORKERS / hardware
  std::string out_prefix;  // empty = no files
  nlohmann::json canonical;  // validated config with defaults filled in
};

struct ValidationResult {
  bool ok = false;
  std::vector<std::string> errors;  // every violation, not just the first
  std::optional<ExperimentConfig> config;
};

// Parses and cross-validates; on success the canonical form has every default
// filled in and is what run_experiment echoes into output metadata.
ValidationResult validate_config(const nlohmann::json& raw);
ValidationResult validate_config_text(const std::string& text);

}  // namespace ergolab::runner
