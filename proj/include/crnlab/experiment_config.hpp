#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crnlab/ensemble.hpp"
#include "crnlab/harness.hpp"

namespace crnlab {

/// Schema violation in an experiment config; field() is a JSON pointer.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument((field.empty() ? "/" : field) + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentOutcome {
  nlohmann::json result;
  /// Per-N error matrix (scaling kinds) or per-state table (drift).
  std::string csv;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

/// Runs the experiment described by config. Model paths are resolved against
/// base_dir. Throws ConfigError on schema problems, ParseError on a bad model.
ExperimentOutcome run_experiment(const nlohmann::json& config, const std::filesystem::path& base_dir,
                                 Execution exec = Execution::Parallel);

/// Reads and parses a JSON file; throws ConfigError("", ...) on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

StopRule stop_rule_from_json(const nlohmann::json& j, const std::string& where);
Energy energy_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace crnlab
