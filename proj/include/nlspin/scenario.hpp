#pragma once

// Declarative experiment descriptions read from YAML. The schema is
// documented in docs/config.md.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlspin/dynamics.hpp"
#include "nlspin/hilbert.hpp"
#include "nlspin/two_spin.hpp"

namespace nlspin {

enum class ScenarioKind { kOneSpinFixedPoint, kThermalization, kDisentangle, kButterfly, kDrivenLc, kCustom };

std::string to_string(ScenarioKind kind);

/// Schema violation; the message names the offending key and, when known,
/// the line and column (1-based) in the document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OneSpinConfig {
  Vec3 omega = Vec3::UnitZ();
  Vec3 s_hat = Vec3::UnitZ();
  Vec3 k0 = Vec3::UnitX();
};

struct NoiseConfig {
  double omega_s_sq = 1.0;
  double tau_s = 1.0;
  /// 0 selects the smallest admissible power-of-two grid.
  std::size_t n_grid = 0;
  bool spin1 = true;
  bool spin2 = true;
  /// Also write the realization to noise.csv.
  bool dump = false;
};

enum class InitialKind { kAmplitudes, kRandomEntangled, kPerturbed };
enum class BaseState { kSinglet, kTriplet, kPlusPlus, kMinusMinus };

struct TwoSpinInitial {
  InitialKind kind = InitialKind::kPerturbed;
  CVector amplitudes;
  double abs_e = 0.3;
  BaseState base = BaseState::kSinglet;
  double epsilon = 0.1;
  CVector perturbation;
};

struct AnalysisConfig {
  /// Leading fraction of the run ignored by limit-cycle detection.
  double transient_fraction = 0.2;
  /// Leading fraction of the run ignored by time averages.
  double average_from = 0.2;
};

struct CustomConfig {
  CMatrix hamiltonian;
  bool spin_flip_target = false;
  CVector target;
  CVector initial;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kCustom;
  std::string description;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::size_t ensemble_size = 1;
  EvolutionSettings integrator;
  OneSpinConfig one_spin;
  /// Static field for thermalization runs: omega = omega_0 z.
  double omega_0 = 0.0;
  std::optional<NoiseConfig> noise;
  TwoSpinInitial initial;
  DrivenParams driven;
  AnalysisConfig analysis;
  CustomConfig custom;

  int dimension() const;
  bool uses_randomness() const;
};

/// Parses and validates a YAML document. Defaults are filled in; unknown and
/// duplicate keys are rejected. Throws ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Resolved configuration as JSON text (used for the run manifest).
std::string config_to_json(const ScenarioConfig& config);

}  // namespace nlspin
