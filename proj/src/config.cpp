#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "nlspin/scenario.hpp"

namespace nlspin {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void fail(const std::string& path, const std::string& what, const YAML::Node& node) {
  throw ConfigError(path + ": " + what + where(node));
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a number", n);
  double v = 0.0;
  if (!YAML::convert<double>::decode(n, v) || !std::isfinite(v)) fail(path, "expected a finite number", n);
  return v;
}

std::uint64_t as_uint(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a non-negative integer", n);
  const std::string& s = n.Scalar();
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    fail(path, "expected a non-negative integer", n);
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    fail(path, "integer out of range", n);
  }
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  bool v = false;
  if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) fail(path, "expected true or false", n);
  return v;
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a string", n);
  return n.Scalar();
}

Complex as_complex(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) return {as_double(n, path), 0.0};
  if (n.IsSequence() && n.size() == 2) return {as_double(n[0], path + "[0]"), as_double(n[1], path + "[1]")};
  fail(path, "expected a number or a [re, im] pair", n);
}

Vec3 as_vec3(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 3) fail(path, "expected a list of 3 numbers", n);
  Vec3 v;
  for (std::size_t i = 0; i < 3; ++i) v[static_cast<int>(i)] = as_double(n[i], path + "[" + std::to_string(i) + "]");
  return v;
}

CVector as_cvector(const YAML::Node& n, const std::string& path, int dim) {
  if (!n.IsSequence() || static_cast<int>(n.size()) != dim) {
    fail(path, "expected a list of " + std::to_string(dim) + " amplitudes", n);
  }
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = as_complex(n[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  if (v.squaredNorm() == 0.0) fail(path, "amplitudes must not all vanish", n);
  return v;
}

CMatrix as_cmatrix(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || (n.size() != 2 && n.size() != 4)) fail(path, "expected a 2x2 or 4x4 matrix", n);
  const int dim = static_cast<int>(n.size());
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const YAML::Node row = n[static_cast<std::size_t>(i)];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.IsSequence() || static_cast<int>(row.size()) != dim) fail(rp, "expected a row of " + std::to_string(dim), row);
    for (int j = 0; j < dim; ++j) m(i, j) = as_complex(row[static_cast<std::size_t>(j)], rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

// A mapping whose keys are checked against an allowed set.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node.IsMap()) fail(path_.empty() ? "document" : path_, "expected a mapping", node);
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key = as_string(it->first, qualify("<key>"));
      if (!entries_.emplace(key, it->second).second) fail(qualify(key), "duplicate key", it->first);
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(qualify(key), "unknown key (expected one of: " + list + ")", it->first);
      }
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const YAML::Node& at(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(qualify(key), "required key is missing", node_);
    return it->second;
  }
  std::string qualify(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const YAML::Node& node() const { return node_; }

  double number(const std::string& key, double fallback) const {
    return has(key) ? as_double(at(key), qualify(key)) : fallback;
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::map<std::string, YAML::Node> entries_;
};

const std::map<std::string, ScenarioKind>& scenario_names() {
  static const std::map<std::string, ScenarioKind> names{
      {"one_spin_fixed_point", ScenarioKind::kOneSpinFixedPoint},
      {"thermalization", ScenarioKind::kThermalization},
      {"disentangle", ScenarioKind::kDisentangle},
      {"butterfly", ScenarioKind::kButterfly},
      {"driven_lc", ScenarioKind::kDrivenLc},
      {"custom", ScenarioKind::kCustom}};
  return names;
}

std::set<std::string> top_level_keys(ScenarioKind kind) {
  std::set<std::string> keys{"scenario", "description", "output", "seed", "ensemble_size", "integrator"};
  switch (kind) {
    case ScenarioKind::kOneSpinFixedPoint:
      keys.insert("one_spin");
      break;
    case ScenarioKind::kThermalization:
      keys.insert({"one_spin", "noise", "analysis"});
      break;
    case ScenarioKind::kDisentangle:
    case ScenarioKind::kButterfly:
      keys.insert("two_spin");
      break;
    case ScenarioKind::kDrivenLc:
      keys.insert({"driven", "two_spin", "noise", "analysis"});
      break;
    case ScenarioKind::kCustom:
      keys.insert({"custom", "noise"});
      break;
  }
  return keys;
}

void parse_integrator(const Section& top, EvolutionSettings& s) {
  if (!top.has("integrator")) return;
  const Section sec(top.at("integrator"), "integrator",
                    {"dt", "t_final", "gamma_d", "renormalize_every_step", "singular_guard_eps", "sample_stride"});
  s.dt = sec.number("dt", s.dt);
  s.t_final = sec.number("t_final", s.t_final);
  s.gamma_d = sec.number("gamma_d", s.gamma_d);
  s.singular_guard_eps = sec.number("singular_guard_eps", s.singular_guard_eps);
  if (sec.has("renormalize_every_step")) {
    s.renormalize_every_step = as_bool(sec.at("renormalize_every_step"), "integrator.renormalize_every_step");
  }
  if (sec.has("sample_stride")) s.sample_stride = as_uint(sec.at("sample_stride"), "integrator.sample_stride");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail("integrator", e.what(), sec.node());
  }
}

void parse_one_spin(const Section& top, ScenarioConfig& c) {
  const bool thermal = c.kind == ScenarioKind::kThermalization;
  const Section sec(top.at("one_spin"), "one_spin",
                    thermal ? std::set<std::string>{"omega_0", "s_hat", "k0"}
                            : std::set<std::string>{"omega", "s_hat", "k0"});
  if (thermal) {
    c.omega_0 = as_double(sec.at("omega_0"), "one_spin.omega_0");
    c.one_spin.omega = c.omega_0 * Vec3::UnitZ();
  } else {
    c.one_spin.omega = as_vec3(sec.at("omega"), "one_spin.omega");
  }
  if (sec.has("s_hat")) {
    const Vec3 s = as_vec3(sec.at("s_hat"), "one_spin.s_hat");
    if (std::abs(s.norm() - 1.0) > 1e-12) fail("one_spin.s_hat", "must be a unit vector", sec.at("s_hat"));
    c.one_spin.s_hat = s;
  }
  if (sec.has("k0")) {
    const Vec3 k = as_vec3(sec.at("k0"), "one_spin.k0");
    if (std::abs(k.norm() - 1.0) > 1e-10) fail("one_spin.k0", "must be a unit vector (pure state)", sec.at("k0"));
    c.one_spin.k0 = k;
  }
}

void parse_noise(const Section& top, ScenarioConfig& c) {
  if (!top.has("noise")) return;
  const Section sec(top.at("noise"), "noise", {"omega_s_sq", "tau_s", "n_grid", "couple", "dump"});
  NoiseConfig n;
  n.omega_s_sq = as_double(sec.at("omega_s_sq"), "noise.omega_s_sq");
  n.tau_s = as_double(sec.at("tau_s"), "noise.tau_s");
  if (!(n.omega_s_sq > 0.0)) fail("noise.omega_s_sq", "must be > 0", sec.at("omega_s_sq"));
  if (!(n.tau_s > 0.0)) fail("noise.tau_s", "must be > 0", sec.at("tau_s"));
  if (sec.has("n_grid")) n.n_grid = as_uint(sec.at("n_grid"), "noise.n_grid");
  if (sec.has("dump")) n.dump = as_bool(sec.at("dump"), "noise.dump");
  if (sec.has("couple")) {
    const YAML::Node& list = sec.at("couple");
    if (!list.IsSequence() || list.size() == 0) fail("noise.couple", "expected a non-empty list of spin indices", list);
    n.spin1 = n.spin2 = false;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto idx = as_uint(list[i], "noise.couple[" + std::to_string(i) + "]");
      if (idx == 1) {
        n.spin1 = true;
      } else if (idx == 2) {
        n.spin2 = true;
      } else {
        fail("noise.couple[" + std::to_string(i) + "]", "spin index must be 1 or 2", list[i]);
      }
    }
  }
  c.noise = n;
}

BaseState parse_base(const YAML::Node& n, const std::string& path) {
  const std::string s = as_string(n, path);
  if (s == "singlet") return BaseState::kSinglet;
  if (s == "triplet") return BaseState::kTriplet;
  if (s == "plus_plus") return BaseState::kPlusPlus;
  if (s == "minus_minus") return BaseState::kMinusMinus;
  fail(path, "expected one of: singlet, triplet, plus_plus, minus_minus", n);
}

void parse_two_spin(const Section& top, ScenarioConfig& c) {
  if (!top.has("two_spin")) {
    if (c.kind == ScenarioKind::kDisentangle) c.initial.kind = InitialKind::kRandomEntangled;
    if (c.kind == ScenarioKind::kDrivenLc) fail("two_spin", "required key is missing", top.node());
    return;
  }
  const YAML::Node& node = top.at("two_spin");
  if (!node.IsMap()) fail("two_spin", "expected a mapping", node);
  const YAML::Node kind_node = node["initial"];
  if (!kind_node) fail("two_spin.initial", "required key is missing", node);
  const std::string kind = as_string(kind_node, "two_spin.initial");
  TwoSpinInitial& init = c.initial;
  if (kind == "amplitudes") {
    const Section sec(node, "two_spin", {"initial", "amplitudes"});
    init.kind = InitialKind::kAmplitudes;
    init.amplitudes = as_cvector(sec.at("amplitudes"), "two_spin.amplitudes", 4);
  } else if (kind == "random_entangled") {
    const Section sec(node, "two_spin", {"initial", "abs_e"});
    init.kind = InitialKind::kRandomEntangled;
    init.abs_e = sec.number("abs_e", init.abs_e);
    if (!(init.abs_e >= 0.0) || init.abs_e > 0.5) fail("two_spin.abs_e", "must lie in [0, 0.5]", sec.at("abs_e"));
  } else if (kind == "perturbed") {
    const Section sec(node, "two_spin", {"initial", "base", "epsilon", "perturbation"});
    init.kind = InitialKind::kPerturbed;
    init.base = parse_base(sec.at("base"), "two_spin.base");
    init.epsilon = as_double(sec.at("epsilon"), "two_spin.epsilon");
    if (!(init.epsilon >= 0.0)) fail("two_spin.epsilon", "must be >= 0", sec.at("epsilon"));
    init.perturbation = as_cvector(sec.at("perturbation"), "two_spin.perturbation", 4);
  } else {
    fail("two_spin.initial", "expected one of: amplitudes, random_entangled, perturbed", kind_node);
  }
  if (c.kind == ScenarioKind::kButterfly &&
      (init.kind != InitialKind::kPerturbed ||
       (init.base != BaseState::kSinglet && init.base != BaseState::kTriplet))) {
    fail("two_spin", "butterfly runs need initial: perturbed with base singlet or triplet", node);
  }
}

void parse_driven(const Section& top, ScenarioConfig& c) {
  const Section sec(top.at("driven"), "driven", {"omega_a", "omega_1", "delta", "g"});
  c.driven.omega_a = as_double(sec.at("omega_a"), "driven.omega_a");
  c.driven.omega_1 = as_double(sec.at("omega_1"), "driven.omega_1");
  c.driven.delta = as_double(sec.at("delta"), "driven.delta");
  c.driven.g = as_double(sec.at("g"), "driven.g");
}

void parse_analysis(const Section& top, ScenarioConfig& c) {
  if (!top.has("analysis")) return;
  const Section sec(top.at("analysis"), "analysis", {"transient_fraction", "average_from"});
  c.analysis.transient_fraction = sec.number("transient_fraction", c.analysis.transient_fraction);
  c.analysis.average_from = sec.number("average_from", c.analysis.average_from);
  for (const auto& [key, v] : {std::pair{"transient_fraction", c.analysis.transient_fraction},
                               std::pair{"average_from", c.analysis.average_from}}) {
    if (!(v >= 0.0 && v < 1.0)) fail(std::string("analysis.") + key, "must lie in [0, 1)", sec.node());
  }
}

void parse_custom(const Section& top, ScenarioConfig& c) {
  const Section sec(top.at("custom"), "custom", {"hamiltonian", "target", "initial"});
  c.custom.hamiltonian = as_cmatrix(sec.at("hamiltonian"), "custom.hamiltonian");
  const int dim = static_cast<int>(c.custom.hamiltonian.rows());
  try {
    HermitianOperator{c.custom.hamiltonian};
  } catch (const std::invalid_argument&) {
    fail("custom.hamiltonian", "matrix must be Hermitian", sec.at("hamiltonian"));
  }
  const YAML::Node& target = sec.at("target");
  if (target.IsScalar()) {
    if (as_string(target, "custom.target") != "spin_flip") {
      fail("custom.target", "expected spin_flip or a list of amplitudes", target);
    }
    if (dim != 4) fail("custom.target", "spin_flip needs a 4x4 hamiltonian", target);
    c.custom.spin_flip_target = true;
  } else {
    c.custom.target = as_cvector(target, "custom.target", dim);
  }
  c.custom.initial = as_cvector(sec.at("initial"), "custom.initial", dim);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [name, k] : scenario_names()) {
    if (k == kind) return name;
  }
  return "unknown";
}

int ScenarioConfig::dimension() const {
  switch (kind) {
    case ScenarioKind::kOneSpinFixedPoint:
    case ScenarioKind::kThermalization:
      return 2;
    case ScenarioKind::kCustom:
      return static_cast<int>(custom.hamiltonian.rows());
    default:
      return 4;
  }
}

bool ScenarioConfig::uses_randomness() const {
  const bool two_spin = kind == ScenarioKind::kDisentangle || kind == ScenarioKind::kDrivenLc;
  return noise.has_value() || (two_spin && initial.kind == InitialKind::kRandomEntangled);
}

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("malformed document: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("document: expected a mapping at the top level");
  const YAML::Node name_node = root["scenario"];
  if (!name_node) throw ConfigError("scenario: required key is missing");
  const std::string name = as_string(name_node, "scenario");
  const auto found = scenario_names().find(name);
  if (found == scenario_names().end()) {
    fail("scenario", "unknown scenario '" + name +
                         "' (expected one_spin_fixed_point, thermalization, disentangle, butterfly, "
                         "driven_lc or custom)",
         name_node);
  }

  ScenarioConfig c;
  c.kind = found->second;
  const Section top(root, "", top_level_keys(c.kind));
  if (top.has("description")) c.description = as_string(top.at("description"), "description");
  c.output = top.has("output") ? as_string(top.at("output"), "output") : "runs/" + name;
  if (top.has("seed")) c.seed = as_uint(top.at("seed"), "seed");
  if (top.has("ensemble_size")) {
    c.ensemble_size = as_uint(top.at("ensemble_size"), "ensemble_size");
    if (c.ensemble_size == 0) fail("ensemble_size", "must be >= 1", top.at("ensemble_size"));
  }
  parse_integrator(top, c.integrator);

  switch (c.kind) {
    case ScenarioKind::kOneSpinFixedPoint:
      parse_one_spin(top, c);
      break;
    case ScenarioKind::kThermalization:
      parse_one_spin(top, c);
      if (!top.has("noise")) fail("noise", "required key is missing", root);
      parse_noise(top, c);
      parse_analysis(top, c);
      break;
    case ScenarioKind::kDisentangle:
    case ScenarioKind::kButterfly:
      parse_two_spin(top, c);
      if (c.kind == ScenarioKind::kButterfly && !top.has("two_spin")) {
        fail("two_spin", "required key is missing", root);
      }
      break;
    case ScenarioKind::kDrivenLc:
      parse_driven(top, c);
      parse_two_spin(top, c);
      parse_noise(top, c);
      parse_analysis(top, c);
      break;
    case ScenarioKind::kCustom:
      parse_custom(top, c);
      parse_noise(top, c);
      break;
  }
  if (c.noise && c.dimension() == 2 && !c.noise->spin1) {
    fail("noise.couple", "a single spin can only couple to spin 1", top.at("noise"));
  }
  if (c.uses_randomness() && !c.seed) {
    fail("seed", "required when noise or a random initial state is configured", root);
  }
  if (c.ensemble_size > 1 && !c.uses_randomness()) {
    fail("ensemble_size", "ensembles need noise or a random initial state", top.at("ensemble_size"));
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json vector_json(const CVector& v) {
  auto out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

nlohmann::json vec3_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

const char* base_name(BaseState b) {
  switch (b) {
    case BaseState::kSinglet: return "singlet";
    case BaseState::kTriplet: return "triplet";
    case BaseState::kPlusPlus: return "plus_plus";
    case BaseState::kMinusMinus: return "minus_minus";
  }
  return "";
}

}  // namespace

std::string config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["scenario"] = to_string(c.kind);
  j["description"] = c.description;
  j["output"] = c.output;
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  j["ensemble_size"] = c.ensemble_size;
  const auto& s = c.integrator;
  j["integrator"] = {{"dt", s.dt},
                     {"t_final", s.t_final},
                     {"gamma_d", s.gamma_d},
                     {"renormalize_every_step", s.renormalize_every_step},
                     {"singular_guard_eps", s.singular_guard_eps},
                     {"sample_stride", s.sample_stride}};
  if (c.dimension() == 2 && c.kind != ScenarioKind::kCustom) {
    j["one_spin"] = {{"omega", vec3_json(c.one_spin.omega)},
                     {"s_hat", vec3_json(c.one_spin.s_hat)},
                     {"k0", vec3_json(c.one_spin.k0)}};
    if (c.kind == ScenarioKind::kThermalization) j["one_spin"]["omega_0"] = c.omega_0;
  }
  if (c.kind == ScenarioKind::kDisentangle || c.kind == ScenarioKind::kButterfly ||
      c.kind == ScenarioKind::kDrivenLc) {
    const auto& i = c.initial;
    switch (i.kind) {
      case InitialKind::kAmplitudes:
        j["two_spin"] = {{"initial", "amplitudes"}, {"amplitudes", vector_json(i.amplitudes)}};
        break;
      case InitialKind::kRandomEntangled:
        j["two_spin"] = {{"initial", "random_entangled"}, {"abs_e", i.abs_e}};
        break;
      case InitialKind::kPerturbed:
        j["two_spin"] = {{"initial", "perturbed"},
                         {"base", base_name(i.base)},
                         {"epsilon", i.epsilon},
                         {"perturbation", vector_json(i.perturbation)}};
        break;
    }
  }
  if (c.kind == ScenarioKind::kDrivenLc) {
    j["driven"] = {{"omega_a", c.driven.omega_a},
                   {"omega_1", c.driven.omega_1},
                   {"delta", c.driven.delta},
                   {"g", c.driven.g}};
  }
  if (c.kind == ScenarioKind::kThermalization || c.kind == ScenarioKind::kDrivenLc) {
    j["analysis"] = {{"transient_fraction", c.analysis.transient_fraction},
                     {"average_from", c.analysis.average_from}};
  }
  if (c.kind == ScenarioKind::kCustom) {
    auto h = nlohmann::json::array();
    for (int r = 0; r < c.custom.hamiltonian.rows(); ++r) {
      auto row = nlohmann::json::array();
      for (int col = 0; col < c.custom.hamiltonian.cols(); ++col) row.push_back(complex_json(c.custom.hamiltonian(r, col)));
      h.push_back(row);
    }
    j["custom"] = {{"hamiltonian", h},
                   {"target", c.custom.spin_flip_target ? nlohmann::json("spin_flip") : vector_json(c.custom.target)},
                   {"initial", vector_json(c.custom.initial)}};
  }
  if (c.noise) {
    auto couple = nlohmann::json::array();
    if (c.noise->spin1) couple.push_back(1);
    if (c.noise->spin2 && c.dimension() == 4) couple.push_back(2);
    j["noise"] = {{"omega_s_sq", c.noise->omega_s_sq},
                  {"tau_s", c.noise->tau_s},
                  {"n_grid", c.noise->n_grid},
                  {"couple", couple},
                  {"dump", c.noise->dump}};
  }
  return j.dump(2);
}

}  // namespace nlspin
