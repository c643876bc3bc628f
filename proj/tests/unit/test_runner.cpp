#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlspin/runner.hpp"

using namespace nlspin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nlspin_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kButterfly = R"(scenario: butterfly
integrator: {dt: 1.0e-3, t_final: 2, gamma_d: 1, sample_stride: 100}
two_spin:
  initial: perturbed
  base: singlet
  epsilon: 0.1
  perturbation: [[0.4, 0.2], [0.3, -0.5], [-0.2, 0.4], [0.5, 0.1]]
)";

const char* kThermal = R"(scenario: thermalization
seed: 77
ensemble_size: 3
integrator: {dt: 1.0e-2, t_final: 20, gamma_d: 1, sample_stride: 10}
one_spin: {omega_0: 2, s_hat: [0, 0, 1], k0: [1, 0, 0]}
noise: {omega_s_sq: 1, tau_s: 0.2}
)";

}  // namespace

TEST_CASE("run_scenario writes CSVs and a manifest") {
  const fs::path dir = scratch("single");
  const RunOutcome out = run_scenario(parse_config(kButterfly), dir);
  REQUIRE(out.code == exit_code::kOk);
  const std::string traj = slurp(dir / "trajectory.csv");
  CHECK(traj.rfind("t,s1_x,s1_y,s1_z,s2_x,s2_y,s2_z,purity,abs_e,r\n", 0) == 0);
  CHECK(traj.find('\r') == std::string::npos);
  CHECK(slurp(dir / "summary.csv").rfind("key,value\n", 0) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["schema_version"] == 1);
  CHECK(manifest["config"]["scenario"] == "butterfly");
  CHECK(manifest["files"]["trajectory.csv"] == sha256_file(dir / "trajectory.csv"));
  CHECK_FALSE(fs::exists(dir / "FAILED"));

  // Full precision: every number round-trips.
  std::istringstream lines(traj);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.rfind("0,", 0) == 0);
}

TEST_CASE("reruns are byte-identical") {
  const ScenarioConfig c = parse_config(kThermal);
  ScenarioConfig single = c;
  single.ensemble_size = 1;
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  REQUIRE(run_scenario(single, a).code == 0);
  REQUIRE(run_scenario(single, b).code == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
}

TEST_CASE("ensembles aggregate member summaries") {
  const ScenarioConfig c = parse_config(kThermal);
  const fs::path one = scratch("ens1"), two = scratch("ens2");
  const RunOutcome r1 = run_ensemble(c, one, 1);
  const RunOutcome r2 = run_ensemble(c, two, 3);
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(slurp(one / "aggregate.csv") == slurp(two / "aggregate.csv"));
  CHECK(fs::exists(one / "member_002" / "trajectory.csv"));
  CHECK(slurp(one / "aggregate.csv").find("kpar_time_average,") != std::string::npos);
  CHECK(member_seed(77, 0) != member_seed(77, 1));

  ScenarioConfig solo = c;
  solo.ensemble_size = 1;
  const fs::path s = scratch("ens_solo");
  const RunOutcome rs = run_ensemble(solo, s, 2);
  const auto member = nlohmann::json::parse(slurp(s / "member_000" / "manifest.json"));
  CHECK(member["config"]["seed"] == member_seed(77, 0));
  CHECK(summary_value(rs.summary, "kpar_time_average") ==
        summary_value(run_scenario(member_seed(77, 0) == 0 ? solo : [&] {
          ScenarioConfig m = solo;
          m.seed = member_seed(77, 0);
          return m;
        }(), scratch("ens_solo_direct")).summary, "kpar_time_average"));
}

TEST_CASE("divergence keeps partial output and a failure marker") {
  const fs::path dir = scratch("diverge");
  const ScenarioConfig c = parse_config(R"(scenario: custom
integrator: {dt: 0.5, t_final: 100, renormalize_every_step: false}
custom:
  hamiltonian: [[1.0e200, 0], [0, 1.0e200]]
  target: [1, 0]
  initial: [1, 1]
)");
  const RunOutcome out = run_scenario(c, dir);
  CHECK(out.code == exit_code::kDiverged);
  CHECK(fs::exists(dir / "FAILED"));
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["status"] == "failed");
}

TEST_CASE("runtime config errors map to exit code 2") {
  const ScenarioConfig c = parse_config(R"(scenario: thermalization
seed: 1
integrator: {t_final: 1}
one_spin: {omega_0: 1}
noise: {omega_s_sq: 1, tau_s: 1, n_grid: 512}
)");
  CHECK(run_scenario(c, scratch("badgrid")).code == exit_code::kConfig);
}

TEST_CASE("unwritable output maps to exit code 4") {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  CHECK(run_scenario(parse_config(kButterfly), file / "sub").code == exit_code::kIo);
}

TEST_CASE("catalog configs parse") {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(NLSPIN_CATALOG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    CHECK_NOTHROW(load_config(e.path().string()));
    ++count;
  }
  CHECK(count == 6);
}
