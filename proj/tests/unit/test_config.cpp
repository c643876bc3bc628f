#include <doctest.h>

#include <string>

#include "nlspin/scenario.hpp"

using namespace nlspin;

namespace {

const char* kMinimalFixedPoint = R"(scenario: one_spin_fixed_point
integrator:
  gamma_d: 0.25
one_spin:
  omega: [0, 0, 1]
  s_hat: [1, 0, 0]
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("minimal fixed-point config gets defaults") {
  const ScenarioConfig c = parse_config(kMinimalFixedPoint);
  CHECK(c.kind == ScenarioKind::kOneSpinFixedPoint);
  CHECK(c.integrator.gamma_d == 0.25);
  CHECK(c.integrator.dt == 1e-3);
  CHECK(c.integrator.renormalize_every_step);
  CHECK(c.integrator.singular_guard_eps == 1e-12);
  CHECK(c.ensemble_size == 1);
  CHECK(c.output == "runs/one_spin_fixed_point");
  CHECK(c.one_spin.k0 == Vec3::UnitX());
  CHECK_FALSE(c.seed.has_value());
  CHECK(c.dimension() == 2);
}

TEST_CASE("noise without a seed is rejected") {
  const std::string text = R"(scenario: thermalization
one_spin: {omega_0: 10}
noise: {omega_s_sq: 10, tau_s: 5}
)";
  CHECK(contains(error_of(text), "seed"));
  CHECK_NOTHROW(parse_config(text + "seed: 3\n"));
}

TEST_CASE("duplicate keys are rejected with their position") {
  const std::string err = error_of(std::string(kMinimalFixedPoint) + "integrator:\n  dt: 0.1\n");
  CHECK(contains(err, "integrator: duplicate key"));
  CHECK(contains(err, "line 7, column 1"));
  const std::string nested = error_of("scenario: custom\ncustom:\n  target: spin_flip\n  target: spin_flip\n");
  CHECK(contains(nested, "custom.target: duplicate key (line 4, column 3)"));
}

TEST_CASE("unknown keys and wrong types name the key") {
  CHECK(contains(error_of(std::string(kMinimalFixedPoint) + "colour: blue\n"), "colour: unknown key"));
  CHECK(contains(error_of("scenario: one_spin_fixed_point\nintegrator: {dt: fast}\none_spin: {omega: [0,0,1]}\n"),
                 "integrator.dt: expected a finite number"));
  CHECK(contains(error_of("scenario: one_spin_fixed_point\none_spin: {omega: [0, 1]}\n"),
                 "one_spin.omega: expected a list of 3 numbers"));
  CHECK(contains(error_of("scenario: one_spin_fixed_point\none_spin: {omega: [0,0,1], s_hat: [1,1,0]}\n"),
                 "one_spin.s_hat: must be a unit vector"));
  CHECK(contains(error_of("scenario: warp_drive\n"), "unknown scenario"));
  CHECK(contains(error_of("scenario: one_spin_fixed_point\n"), "one_spin: required key is missing"));
  CHECK(contains(error_of("scenario: one_spin_fixed_point\nnoise: {omega_s_sq: 1, tau_s: 1}\none_spin: {omega: [0,0,1]}\n"),
                 "noise: unknown key"));
  CHECK(contains(error_of("scenario: disentangle\nseed: -4\n"), "seed: expected a non-negative integer"));
  CHECK(contains(error_of("scenario: disentangle\nseed: 1\nintegrator: {dt: 0.3, t_final: 1}\n"),
                 "integer multiple of dt"));
  CHECK(contains(error_of("scenario: [unclosed\n"), "malformed"));
}

TEST_CASE("two-spin initial states") {
  const ScenarioConfig d = parse_config("scenario: disentangle\nseed: 9\n");
  CHECK(d.initial.kind == InitialKind::kRandomEntangled);
  CHECK(d.initial.abs_e == 0.3);
  CHECK(d.uses_randomness());

  const ScenarioConfig b = parse_config(R"(scenario: butterfly
two_spin:
  initial: perturbed
  base: triplet
  epsilon: 0.01
  perturbation: [1, [0, 1], 0, 0]
)");
  CHECK(b.initial.base == BaseState::kTriplet);
  CHECK(b.initial.perturbation[1] == Complex(0.0, 1.0));
  CHECK_FALSE(b.uses_randomness());
  CHECK(contains(error_of("scenario: butterfly\ntwo_spin: {initial: random_entangled}\n"), "butterfly runs need"));
  CHECK(contains(error_of("scenario: disentangle\ntwo_spin: {initial: amplitudes, amplitudes: [0, 0, 0, 0]}\n"),
                 "must not all vanish"));
}

TEST_CASE("ensembles need randomness") {
  CHECK(contains(error_of(std::string(kMinimalFixedPoint) + "ensemble_size: 4\n"), "ensemble_size"));
}

TEST_CASE("custom scenario") {
  const ScenarioConfig c = parse_config(R"(scenario: custom
custom:
  hamiltonian: [[1, [0, -1]], [[0, 1], -1]]
  target: [1, 0]
  initial: [0, 1]
)");
  CHECK(c.dimension() == 2);
  CHECK(c.custom.hamiltonian(0, 1) == Complex(0, -1));
  CHECK(contains(error_of("scenario: custom\ncustom:\n  hamiltonian: [[0, 1], [0, 0]]\n  target: [1, 0]\n  initial: [0, 1]\n"),
                 "Hermitian"));
  CHECK(contains(error_of("scenario: custom\ncustom:\n  hamiltonian: [[0, 1], [1, 0]]\n  target: spin_flip\n  initial: [0, 1]\n"),
                 "spin_flip needs"));
}

TEST_CASE("JSON echo of the resolved config") {
  const std::string json = config_to_json(parse_config(kMinimalFixedPoint));
  CHECK(contains(json, "\"scenario\": \"one_spin_fixed_point\""));
  CHECK(contains(json, "\"gamma_d\": 0.25"));
  CHECK(contains(json, "\"seed\": null"));
}
