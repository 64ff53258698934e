#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bfix {

struct ExperimentConfig {
  std::string experiment;
  nlohmann::ordered_json parameters;  ///< every declared parameter, defaults filled in
  std::optional<std::string> output;
  std::uint64_t seed = 0;
};

/// Parses a config document, fills defaults and rejects unknown keys. Throws ConfigError
/// listing every problem found.
ExperimentConfig validate_config(const nlohmann::ordered_json& raw);

struct VerdictEntry {
  std::string name;
  nlohmann::ordered_json value;
  bool asserted = true;  ///< counts towards the exit status
  bool passed = true;
  std::string provenance;  ///< library operation that produced the value
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<VerdictEntry> verdicts;
  double runtime_seconds = 0.0;

  bool all_passed() const;
  std::string rows_csv() const;
  nlohmann::ordered_json verdicts_json() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes <dir>/rows.csv and <dir>/verdicts.json.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> columns;
};

std::vector<ExperimentInfo> experiment_catalog();

/// Names accepted for comparison functions, spaces, maps, multimaps and potentials.
std::vector<std::pair<std::string, std::vector<std::string>>> function_catalog();

/// Help text documenting every experiment's parameters and CSV columns.
std::string experiments_help();

}  // namespace bfix
