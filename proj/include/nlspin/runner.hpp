#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlspin/scenario.hpp"

namespace nlspin {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kDiverged = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Summary = std::vector<std::pair<std::string, double>>;

/// In-memory result of one scenario run.
struct ScenarioResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Summary summary;
  /// Free-text diagnostics copied into the manifest.
  std::vector<std::string> notes;
  std::string noise_csv;
};

/// Runs the scenario without touching the file system. Throws ConfigError for
/// parameters that only fail at run time and IntegrationDiverged on blow-up.
ScenarioResult simulate(const ScenarioConfig& config);

/// Value of `key` in a summary; throws std::out_of_range when absent.
double summary_value(const Summary& summary, const std::string& key);

struct RunOutcome {
  int code = exit_code::kOk;
  std::string message;
  std::filesystem::path directory;
  Summary summary;
};

/// Runs one member and writes trajectory.csv, summary.csv (optionally
/// noise.csv) and finally manifest.json into `directory`. A failed run keeps
/// its partial outputs next to a FAILED marker.
RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& directory);

/// Runs config.ensemble_size members (member_000, member_001, ...) with seeds
/// derived from the master seed, at most `jobs` at a time, then writes
/// aggregate.csv (key, mean, stderr, count over successful members) and a
/// top-level manifest.json. The returned code is the first member failure, if any.
RunOutcome run_ensemble(const ScenarioConfig& config, const std::filesystem::path& directory,
                        unsigned jobs);

/// Seed of ensemble member `index`.
std::uint64_t member_seed(std::uint64_t master, std::size_t index);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace nlspin
