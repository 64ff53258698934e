#include "bfix/errors.hpp"
#include "bfix/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point computation and verification in b-metric spaces"};
  app.footer(bfix::experiments_help());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory for rows.csv and verdicts.json (overrides config 'output')");
  run->add_option("--seed", seed, "master seed (overrides config 'seed')");

  auto* list_experiments = app.add_subcommand("list-experiments", "list experiments and their CSV columns");
  auto* list_functions = app.add_subcommand("list-functions", "list named functions, spaces and maps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_experiments) {
      for (const auto& e : bfix::experiment_catalog()) {
        std::cout << e.name << "\t" << e.summary << "\n\tcolumns: ";
        for (std::size_t i = 0; i < e.columns.size(); ++i) std::cout << (i ? "," : "") << e.columns[i];
        std::cout << '\n';
      }
      return 0;
    }
    if (*list_functions) {
      for (const auto& [group, names] : bfix::function_catalog()) {
        std::cout << group << ":\n";
        for (const auto& n : names) std::cout << "  " << n << '\n';
      }
      return 0;
    }

    std::ifstream in(config_path);
    nlohmann::ordered_json raw;
    try {
      raw = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw bfix::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto config = bfix::validate_config(raw);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output = out_dir;
    const std::string dir = config.output.value_or("bfix-out");

    const auto report = bfix::run_experiment(config);
    bfix::write_report(report, dir);
    for (const auto& v : report.verdicts) {
      if (!v.asserted) continue;
      std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << " = " << v.value.dump() << '\n';
    }
    std::cout << "wrote " << dir << "/rows.csv and " << dir << "/verdicts.json\n";
    return report.all_passed() ? 0 : 1;
  } catch (const bfix::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const bfix::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
