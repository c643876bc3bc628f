#include "nlspin/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "csv.hpp"
#include "nlspin/bloch.hpp"
#include "nlspin/limit_cycle.hpp"
#include "nlspin/noise.hpp"
#include "nlspin/two_spin.hpp"

#ifndef NLSPIN_VERSION
#define NLSPIN_VERSION "unknown"
#endif

namespace nlspin {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestSchema = 1;

const std::vector<std::string> kOneSpinColumns{"t", "k_x", "k_y", "k_z"};

std::vector<std::string> two_spin_columns() {
  std::vector<std::string> cols{"t"};
  for (const auto& o : two_spin_observables()) cols.push_back(o.name);
  return cols;
}

std::vector<NamedObservable> one_spin_observables() {
  std::vector<NamedObservable> obs;
  for (int i = 0; i < 3; ++i) {
    obs.push_back({kOneSpinColumns[static_cast<std::size_t>(i) + 1],
                   [i](double, const StateVector& s) { return bloch_from_state(s).k()[i]; }});
  }
  return obs;
}

void fill_rows(const Trajectory& traj, ScenarioResult& out) {
  out.rows.clear();
  out.rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i]};
    for (const auto& [name, values] : traj.observables) row.push_back(values[i]);
    out.rows.push_back(std::move(row));
  }
}

std::mt19937_64 initial_state_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    0x696e6974u};
  return std::mt19937_64(seq);
}

CVector base_amplitudes(BaseState base) {
  CVector v = CVector::Zero(4);
  switch (base) {
    case BaseState::kSinglet:
      return bell_singlet().state().amplitudes();
    case BaseState::kTriplet:
      return bell_triplet().state().amplitudes();
    case BaseState::kPlusPlus:
      v[0] = 1.0;
      break;
    case BaseState::kMinusMinus:
      v[3] = 1.0;
      break;
  }
  return v;
}

StateVector two_spin_initial(const ScenarioConfig& c) {
  const TwoSpinInitial& i = c.initial;
  switch (i.kind) {
    case InitialKind::kAmplitudes:
      return StateVector(i.amplitudes);
    case InitialKind::kRandomEntangled: {
      auto engine = initial_state_engine(c.seed.value_or(0));
      return random_state_with_entanglement(i.abs_e, engine).state();
    }
    case InitialKind::kPerturbed:
      return StateVector(CVector(base_amplitudes(i.base) + i.epsilon * StateVector(i.perturbation).amplitudes()));
  }
  throw std::logic_error("unhandled initial state kind");
}

std::optional<NoiseRealization> make_noise(const ScenarioConfig& c, int components, ScenarioResult& out) {
  if (!c.noise) return std::nullopt;
  const NoiseConfig& n = *c.noise;
  NoiseParams p;
  p.omega_s_sq = n.omega_s_sq;
  p.tau_s = n.tau_s;
  p.t_total = std::max(c.integrator.t_final, 100.0 * n.tau_s);
  p.n_grid = n.n_grid != 0 ? n.n_grid : default_grid_size(n.tau_s, p.t_total);
  p.seed = c.seed.value_or(0);
  p.n_components = components;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  NoiseRealization r = synthesize(p);
  out.notes.push_back("noise window " + detail::format_double(p.t_total) + " with " + std::to_string(p.n_grid) +
                      " grid points");
  if (n.dump) {
    std::ostringstream csv;
    write_noise_csv(r, csv);
    out.noise_csv = csv.str();
  }
  return r;
}

HamiltonianProvider provider_for(const HermitianOperator& base, const std::optional<NoiseRealization>& noise,
                                 const NoiseCoupling& coupling) {
  if (!noise) return [base](double) { return base; };
  return [base, &noise, coupling](double t) { return noisy_hamiltonian(base, *noise, t, coupling); };
}

double vector_angle(const Vec3& a, const Vec3& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  return angle_between(a, b);
}

void run_one_spin_fixed_point(const ScenarioConfig& c, ScenarioResult& out) {
  OneSpinParams p{c.one_spin.omega, c.one_spin.s_hat, c.integrator.gamma_d};
  p.validate();
  const Trajectory traj = evolve(state_from_bloch(c.one_spin.k0), one_spin_hamiltonian(p.omega),
                                 TargetRule::fixed(spin_target(p.s_hat)), c.integrator, one_spin_observables());
  out.columns = kOneSpinColumns;
  fill_rows(traj, out);
  const Vec3 k = bloch_from_state(traj.states.back()).k();
  const double w = p.omega.norm();
  out.summary = {{"gamma_over_omega", w > 0.0 ? p.gamma_d / w : INFINITY},
                 {"final_k_x", k.x()},
                 {"final_k_y", k.y()},
                 {"final_k_z", k.z()},
                 {"guarded_steps", static_cast<double>(traj.guarded_steps)}};
  try {
    const Vec3 rhs = bloch_rhs(k, p);
    out.summary.emplace_back("final_rhs_norm", rhs.norm());
  } catch (const SingularPoint&) {
    out.notes.push_back("final state sits on the target; rhs undefined");
  }
  try {
    const auto [plus, minus] = fixed_point_weak(p);
    out.summary.emplace_back("weak_formula_angle",
                             std::min(angle_between(k, plus.k()), angle_between(k, minus.k())));
  } catch (const std::exception& e) {
    out.notes.push_back(std::string("weak formula unavailable: ") + e.what());
  }
  try {
    out.summary.emplace_back("strong_formula_angle", angle_between(k, fixed_point_strong(p).k()));
  } catch (const std::exception& e) {
    out.notes.push_back(std::string("strong formula unavailable: ") + e.what());
  }
}

void run_thermalization(const ScenarioConfig& c, ScenarioResult& out) {
  OneSpinParams p{c.one_spin.omega, c.one_spin.s_hat, c.integrator.gamma_d};
  p.validate();
  const auto noise = make_noise(c, 3, out);
  const Trajectory traj = evolve(state_from_bloch(c.one_spin.k0),
                                 provider_for(one_spin_hamiltonian(p.omega), noise, {true, false}),
                                 TargetRule::fixed(spin_target(p.s_hat)), c.integrator, one_spin_observables());
  out.columns = kOneSpinColumns;
  fill_rows(traj, out);

  const auto& kz = traj.series("k_z");
  const double t_start = c.analysis.average_from * c.integrator.t_final;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < kz.size(); ++i) {
    if (traj.times[i] >= t_start) {
      sum += kz[i];
      ++count;
    }
  }
  const double average = count > 0 ? sum / static_cast<double>(count) : NAN;
  const ThermalParams tp{c.omega_0, c.noise->omega_s_sq, c.noise->tau_s};
  const RelaxationRates rates = relaxation_rates(tp);
  const double t_s1 = 1.0 / rates.longitudinal;
  out.summary = {{"kpar_time_average", average},
                 {"kpar_prediction", thermal_steady_state(p.gamma_d, t_s1)},
                 {"inverse_t_s1", rates.longitudinal},
                 {"inverse_t_s2", rates.transverse},
                 {"t_eff_prediction", effective_temperature(p.gamma_d, t_s1)},
                 {"t_eff_from_average", (average < 0.0 && average > -1.0) ? 0.5 / std::atanh(-average) : NAN},
                 {"averaged_samples", static_cast<double>(count)},
                 {"guarded_steps", static_cast<double>(traj.guarded_steps)}};
}

void run_disentangle(const ScenarioConfig& c, ScenarioResult& out) {
  const Trajectory traj = evolve(two_spin_initial(c), HermitianOperator::zero(4), TargetRule::spin_flip(),
                                 c.integrator, two_spin_observables());
  out.columns = two_spin_columns();
  fill_rows(traj, out);
  const auto& e = traj.series("abs_e");
  double max_increase = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i) max_increase = std::max(max_increase, e[i] - e[i - 1]);
  const SpinExpectations s = spin_expectations(TwoSpinState(traj.states.back()));
  out.summary = {{"initial_abs_e", e.front()},
                 {"final_abs_e", e.back()},
                 {"max_abs_e_increase", max_increase},
                 {"final_purity", traj.series("purity").back()},
                 {"final_s1_norm", s.s1.norm()},
                 {"final_s2_norm", s.s2.norm()},
                 {"guarded_steps", static_cast<double>(traj.guarded_steps)}};
}

void run_butterfly(const ScenarioConfig& c, ScenarioResult& out) {
  const BellBase base = c.initial.base == BaseState::kSinglet ? BellBase::kSinglet : BellBase::kTriplet;
  const ButterflyResult res =
      butterfly_run(c.initial.epsilon, TwoSpinState(c.initial.perturbation), base, c.integrator);
  const Trajectory& traj = res.trajectory;
  out.columns = two_spin_columns();
  fill_rows(traj, out);

  auto vec = [&](const char* prefix, std::size_t i) {
    const std::string p(prefix);
    return Vec3(traj.series(p + "_x")[i], traj.series(p + "_y")[i], traj.series(p + "_z")[i]);
  };
  const std::size_t last = traj.times.size() - 1;
  double max_antiparallel = 0.0;
  double sz_drift = 0.0;
  const double sz0 = vec("s1", 0).z() + vec("s2", 0).z();
  for (std::size_t i = 0; i <= last; ++i) {
    max_antiparallel = std::max(max_antiparallel, vector_angle(vec("s1", i), -vec("s2", i)));
    sz_drift = std::max(sz_drift, std::abs(vec("s1", i).z() + vec("s2", i).z() - sz0));
  }
  const ButterflyReport& r = res.report;
  out.summary = {{"initial_s1_plus_re", r.s1_plus.real()},
                 {"initial_s1_plus_im", r.s1_plus.imag()},
                 {"initial_s2_plus_re", r.s2_plus.real()},
                 {"initial_s2_plus_im", r.s2_plus.imag()},
                 {"initial_s1_z", r.s1_z},
                 {"initial_s2_z", r.s2_z}};
  if (r.s_plus_first_order) {
    out.summary.emplace_back("first_order_s_plus_re", r.s_plus_first_order->real());
    out.summary.emplace_back("first_order_s_plus_im", r.s_plus_first_order->imag());
    out.summary.emplace_back("first_order_s_z", *r.s_z_first_order);
  }
  out.summary.insert(out.summary.end(),
                     {{"initial_anti_alignment", (vec("s1", 0) + vec("s2", 0)).norm()},
                      {"max_antiparallel_angle", max_antiparallel},
                      {"direction_change_angle", vector_angle(vec("s1", 0), vec("s1", last))},
                      {"total_sz_drift", sz_drift},
                      {"final_abs_e", traj.series("abs_e").back()},
                      {"final_s1_norm", vec("s1", last).norm()},
                      {"guarded_stationary", r.guarded_stationary ? 1.0 : 0.0},
                      {"guarded_steps", static_cast<double>(traj.guarded_steps)}});
}

void run_driven_lc(const ScenarioConfig& c, ScenarioResult& out) {
  const auto noise = make_noise(c, 6, out);
  const NoiseCoupling coupling = c.noise ? NoiseCoupling{c.noise->spin1, c.noise->spin2} : NoiseCoupling{};
  const Trajectory traj = evolve(two_spin_initial(c), provider_for(omega_matrix(c.driven), noise, coupling),
                                 TargetRule::spin_flip(), c.integrator, two_spin_observables());
  out.columns = two_spin_columns();
  fill_rows(traj, out);
  out.summary = {{"rabi_frequency", rabi_frequency(c.driven)},
                 {"hartmann_hahn_mismatch", hartmann_hahn_mismatch(c.driven)},
                 {"guarded_steps", static_cast<double>(traj.guarded_steps)}};
  try {
    const LimitCycleReport lc = detect_limit_cycle(traj.times, traj.series("s1_z"), c.analysis.transient_fraction);
    out.summary.insert(out.summary.end(), {{"lc_detected", lc.detected ? 1.0 : 0.0},
                                           {"lc_period", lc.period},
                                           {"lc_amplitude", lc.amplitude},
                                           {"lc_amplitude_first", lc.amplitude_first},
                                           {"lc_amplitude_second", lc.amplitude_second},
                                           {"lc_bin_first", static_cast<double>(lc.bin_first)},
                                           {"lc_bin_second", static_cast<double>(lc.bin_second)},
                                           {"lc_transient_end", lc.transient_end}});
    if (!lc.detected) out.notes.push_back("limit cycle not detected: " + lc.reason);
  } catch (const std::invalid_argument& e) {
    out.summary.emplace_back("lc_detected", 0.0);
    out.notes.push_back(std::string("limit-cycle analysis skipped: ") + e.what());
  }
}

void run_custom(const ScenarioConfig& c, ScenarioResult& out) {
  const int dim = c.dimension();
  const TargetRule rule = c.custom.spin_flip_target ? TargetRule::spin_flip() : TargetRule::fixed(c.custom.target);
  const auto noise = make_noise(c, dim == 2 ? 3 : 6, out);
  const NoiseCoupling coupling = c.noise ? NoiseCoupling{c.noise->spin1, c.noise->spin2} : NoiseCoupling{};
  const Trajectory traj =
      evolve(StateVector(c.custom.initial), provider_for(HermitianOperator(c.custom.hamiltonian), noise, coupling),
             rule, c.integrator, dim == 2 ? one_spin_observables() : two_spin_observables());
  out.columns = dim == 2 ? kOneSpinColumns : two_spin_columns();
  fill_rows(traj, out);
  out.summary = {{"samples", static_cast<double>(traj.times.size())},
                 {"guarded_steps", static_cast<double>(traj.guarded_steps)}};
}

// Trajectories that diverged still produce their recorded samples.
struct Diverged {
  ScenarioResult partial;
  std::string message;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

std::string trajectory_csv(const ScenarioResult& r) {
  std::string s;
  for (std::size_t i = 0; i < r.columns.size(); ++i) s += (i ? "," : "") + r.columns[i];
  s += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += detail::format_double(row[i]);
    }
    s += '\n';
  }
  return s;
}

std::string summary_csv(const Summary& summary) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : summary) s += k + "," + detail::format_double(v) + "\n";
  return s;
}

nlohmann::json manifest_base(const ScenarioConfig& c) {
  nlohmann::json m;
  m["schema_version"] = kManifestSchema;
  m["code_version"] = NLSPIN_VERSION;
  m["config"] = nlohmann::json::parse(config_to_json(c));
  return m;
}

}  // namespace

ScenarioResult simulate(const ScenarioConfig& config) {
  ScenarioResult out;
  try {
    switch (config.kind) {
      case ScenarioKind::kOneSpinFixedPoint:
        run_one_spin_fixed_point(config, out);
        break;
      case ScenarioKind::kThermalization:
        run_thermalization(config, out);
        break;
      case ScenarioKind::kDisentangle:
        run_disentangle(config, out);
        break;
      case ScenarioKind::kButterfly:
        run_butterfly(config, out);
        break;
      case ScenarioKind::kDrivenLc:
        run_driven_lc(config, out);
        break;
      case ScenarioKind::kCustom:
        run_custom(config, out);
        break;
    }
  } catch (const IntegrationDiverged&) {
    throw;
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

double summary_value(const Summary& summary, const std::string& key) {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw std::out_of_range("summary has no key '" + key + "'");
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

RunOutcome run_scenario(const ScenarioConfig& config, const fs::path& directory) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.directory = directory;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    outcome.code = exit_code::kIo;
    outcome.message = "cannot create " + directory.string() + ": " + ec.message();
    return outcome;
  }
  fs::remove(directory / "FAILED", ec);

  ScenarioResult result;
  try {
    result = simulate(config);
  } catch (const IntegrationDiverged& e) {
    outcome.code = exit_code::kDiverged;
    outcome.message = e.what();
    const Trajectory& partial = e.partial();
    fill_rows(partial, result);
    result.columns = {"t"};
    for (const auto& [name, values] : partial.observables) result.columns.push_back(name);
  } catch (const ConfigError& e) {
    outcome.code = exit_code::kConfig;
    outcome.message = e.what();
  } catch (const NumericalError& e) {
    outcome.code = exit_code::kDiverged;
    outcome.message = e.what();
  }

  nlohmann::json manifest = manifest_base(config);
  try {
    std::vector<std::string> files;
    if (!result.columns.empty()) {
      write_text(directory / "trajectory.csv", trajectory_csv(result));
      files.push_back("trajectory.csv");
    }
    if (outcome.code == exit_code::kOk) {
      write_text(directory / "summary.csv", summary_csv(result.summary));
      files.push_back("summary.csv");
    }
    if (!result.noise_csv.empty()) {
      write_text(directory / "noise.csv", result.noise_csv);
      files.push_back("noise.csv");
    }
    if (outcome.code != exit_code::kOk) write_text(directory / "FAILED", outcome.message + "\n");
    nlohmann::json checksums = nlohmann::json::object();
    for (const auto& f : files) checksums[f] = sha256_file(directory / f);
    manifest["status"] = outcome.code == exit_code::kOk ? "ok" : "failed";
    manifest["exit_code"] = outcome.code;
    if (!outcome.message.empty()) manifest["message"] = outcome.message;
    manifest["notes"] = result.notes;
    manifest["files"] = checksums;
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(directory / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    outcome.code = exit_code::kIo;
    outcome.message = e.what();
  }
  outcome.summary = std::move(result.summary);
  return outcome;
}

std::uint64_t member_seed(std::uint64_t master, std::size_t index) {
  // splitmix64 finalizer over a Weyl sequence
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RunOutcome run_ensemble(const ScenarioConfig& config, const fs::path& directory, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = config.ensemble_size;
  std::vector<RunOutcome> members(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      ScenarioConfig member = config;
      member.ensemble_size = 1;
      member.seed = member_seed(config.seed.value_or(0), i);
      std::ostringstream name;
      name << "member_" << std::setw(3) << std::setfill('0') << i;
      member.output = (directory / name.str()).string();
      members[i] = run_scenario(member, member.output);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  RunOutcome outcome;
  outcome.directory = directory;
  std::vector<std::string> keys;
  std::map<std::string, std::vector<double>> values;
  std::size_t failures = 0;
  nlohmann::json member_status = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const RunOutcome& m = members[i];
    member_status.push_back({{"directory", m.directory.filename().string()},
                             {"seed", member_seed(config.seed.value_or(0), i)},
                             {"exit_code", m.code}});
    if (m.code != exit_code::kOk) {
      ++failures;
      if (outcome.code == exit_code::kOk) {
        outcome.code = m.code;
        outcome.message = m.directory.filename().string() + ": " + m.message;
      }
      continue;
    }
    for (const auto& [k, v] : m.summary) {
      if (!values.count(k)) keys.push_back(k);
      values[k].push_back(v);
    }
  }

  std::string csv = "key,mean,stderr,count\n";
  for (const auto& k : keys) {
    const auto& v = values[k];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double se = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
    csv += k + "," + detail::format_double(mean) + "," + detail::format_double(se) + "," + std::to_string(v.size()) + "\n";
    outcome.summary.emplace_back(k, mean);
  }
  csv += "failed_members," + std::to_string(failures) + ",0," + std::to_string(n) + "\n";

  try {
    write_text(directory / "aggregate.csv", csv);
    nlohmann::json manifest = manifest_base(config);
    manifest["status"] = failures == 0 ? "ok" : "failed";
    manifest["exit_code"] = outcome.code;
    manifest["members"] = member_status;
    manifest["files"] = {{"aggregate.csv", sha256_file(directory / "aggregate.csv")}};
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(directory / "manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    if (outcome.code == exit_code::kOk) {
      outcome.code = exit_code::kIo;
      outcome.message = e.what();
    }
  }
  return outcome;
}

}  // namespace nlspin
