// Command-line front end: run scenario configs and the shipped catalog.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlspin/runner.hpp"
#include "nlspin/scenario.hpp"

#ifndef NLSPIN_CATALOG_DIR
#define NLSPIN_CATALOG_DIR "catalog"
#endif

namespace fs = std::filesystem;
using namespace nlspin;

namespace {

struct RunOptions {
  unsigned jobs = 1;
  std::string output;
  std::optional<std::uint64_t> seed;
};

fs::path catalog_dir() {
  if (const char* env = std::getenv("NLSPIN_CATALOG")) return env;
  return NLSPIN_CATALOG_DIR;
}

std::vector<fs::path> catalog_entries() {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(catalog_dir(), ec)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_config(const fs::path& path, const RunOptions& opt) {
  ScenarioConfig config;
  try {
    config = load_config(path.string());
  } catch (const ConfigError& e) {
    std::cerr << path.string() << ": " << e.what() << '\n';
    return exit_code::kConfig;
  }
  if (opt.seed) config.seed = opt.seed;
  if (!opt.output.empty()) config.output = opt.output;

  RunOutcome outcome;
  try {
    outcome = config.ensemble_size > 1 ? run_ensemble(config, config.output, opt.jobs)
                                       : run_scenario(config, config.output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kDiverged;
  }
  for (const auto& [key, value] : outcome.summary) std::cout << key << " = " << value << '\n';
  if (outcome.code != exit_code::kOk) {
    std::cerr << "run failed: " << outcome.message << '\n';
  } else {
    std::cout << "outputs written to " << outcome.directory.string() << '\n';
  }
  return outcome.code;
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--jobs,-j", opt.jobs, "Concurrent ensemble members")->check(CLI::PositiveNumber);
  cmd->add_option("--output,-o", opt.output, "Output directory (overrides the config)");
  cmd->add_option("--seed,-s", opt.seed, "Master seed (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Schrodinger-equation spin simulator"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario config");
  simulate->add_option("config", config_path, "YAML scenario file")->required()->check(CLI::ExistingFile);
  add_run_options(simulate, opt);

  auto* catalog = app.add_subcommand("catalog", "Shipped figure configs");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List catalog entries");
  std::string entry;
  auto* run = catalog->add_subcommand("run", "Run a catalog entry");
  run->add_option("name", entry, "Entry name, e.g. fig1a")->required();
  add_run_options(run, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_code::kConfig;
  }

  if (*simulate) return run_config(config_path, opt);
  if (*list) {
    for (const auto& path : catalog_entries()) {
      std::string description;
      try {
        description = load_config(path.string()).description;
      } catch (const ConfigError& e) {
        description = std::string("(invalid: ") + e.what() + ")";
      }
      std::cout << path.stem().string() << "\t" << description << '\n';
    }
    return 0;
  }
  const fs::path path = catalog_dir() / (entry + ".yaml");
  if (!fs::exists(path)) {
    std::cerr << "unknown catalog entry '" << entry << "' (see `nlspin catalog list`)\n";
    return exit_code::kConfig;
  }
  return run_config(path, opt);
}
