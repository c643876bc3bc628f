#include "nlspin/dynamics.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlspin {

namespace {

// M_D |v> for possibly unnormalized amplitudes v. Returns false (and leaves
// `out` zero) when the singular guard triggers.
bool apply_md(const CVector& target, const CVector& v, double guard_eps, CVector& out) {
  const double target_norm_sq = target.squaredNorm();
  const double v_norm_sq = v.squaredNorm();
  const Complex overlap = target.dot(v);
  const double p_mean = std::norm(overlap) / (target_norm_sq * v_norm_sq);
  out = CVector::Zero(v.size());
  if (1.0 - p_mean < guard_eps) return false;
  const double prefactor = -std::sqrt(target_norm_sq / (1.0 - p_mean));
  out = prefactor * (target * (overlap / target_norm_sq) - p_mean * v);
  return true;
}

void check_square_dims(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

TargetRule TargetRule::fixed(const CVector& target) {
  if (target.size() != 2 && target.size() != 4) {
    throw std::invalid_argument("TargetRule::fixed: target dimension must be 2 or 4");
  }
  if (!target.allFinite() || target.squaredNorm() == 0.0) {
    throw std::invalid_argument("TargetRule::fixed: target must be a finite nonzero vector");
  }
  return TargetRule(Fixed{target});
}

TargetRule TargetRule::spin_flip() { return TargetRule(SpinFlip{}); }

void TargetRule::check_dim(int dim) const {
  if (const auto* f = std::get_if<Fixed>(&rule_)) {
    if (f->target.size() != dim) throw std::invalid_argument("TargetRule: target dimension mismatch");
  } else if (dim != 4) {
    throw std::invalid_argument("TargetRule: the spin-flip rule needs a two-spin (dimension 4) state");
  }
}

CVector TargetRule::target_for(const CVector& psi) const {
  if (const auto* f = std::get_if<Fixed>(&rule_)) return f->target;
  if (psi.size() != 4) {
    throw std::invalid_argument("TargetRule: the spin-flip rule needs a two-spin (dimension 4) state");
  }
  CVector t(4);
  t << std::conj(psi[3]), -std::conj(psi[2]), -std::conj(psi[1]), std::conj(psi[0]);
  return t;
}

void EvolutionSettings::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("EvolutionSettings: dt must be > 0");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("EvolutionSettings: t_final must be >= 0");
  }
  if (!(gamma_d >= 0.0) || !std::isfinite(gamma_d)) {
    throw std::invalid_argument("EvolutionSettings: gamma_d must be >= 0");
  }
  if (!(singular_guard_eps > 0.0)) {
    throw std::invalid_argument("EvolutionSettings: singular_guard_eps must be > 0");
  }
  if (sample_stride == 0) throw std::invalid_argument("EvolutionSettings: sample_stride must be >= 1");
  const double steps = t_final / dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw std::invalid_argument("EvolutionSettings: t_final must be an integer multiple of dt");
  }
}

std::size_t EvolutionSettings::step_count() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

MdOperator build_md(const CVector& target, const StateVector& psi, double guard_eps) {
  if (target.size() != psi.dim()) throw std::invalid_argument("build_md: dimension mismatch");
  if (target.squaredNorm() == 0.0) throw std::invalid_argument("build_md: zero target vector");
  const HermitianOperator p = projector(target);
  const double p_mean = expectation(p, psi);
  if (1.0 - p_mean < guard_eps) return {HermitianOperator::zero(psi.dim()), true};
  const double prefactor = -std::sqrt(target.squaredNorm() / (1.0 - p_mean));
  return {(p - HermitianOperator::identity(psi.dim()) * p_mean) * prefactor, false};
}

MseDerivative mse_rhs(const StateVector& psi, const HermitianOperator& h, const TargetRule& rule,
                      double gamma_d, double guard_eps) {
  check_square_dims(h.dim(), psi.dim(), "mse_rhs");
  rule.check_dim(psi.dim());
  const CVector& v = psi.amplitudes();
  CVector md_v;
  const bool ok = apply_md(rule.target_for(v), v, guard_eps, md_v);
#ifndef NDEBUG
  if (rule.is_spin_flip()) {
    const Complex e = v[0] * v[3] - v[1] * v[2];
    assert(std::abs(rule.target_for(v).dot(v) - 2.0 * e) < 1e-10);
  }
#endif
  return {Complex(0.0, -1.0) * (h.matrix() * v) + gamma_d * md_v, !ok};
}

CMatrix mme_rhs(const DensityOperator& rho, const HermitianOperator& h, const HermitianOperator& md,
                double gamma_d) {
  check_square_dims(rho.dim(), h.dim(), "mme_rhs");
  check_square_dims(rho.dim(), md.dim(), "mme_rhs");
  const CMatrix& r = rho.matrix();
  const CMatrix commutator = h.matrix() * r - r * h.matrix();
  return commutator / Complex(0.0, 1.0) + gamma_d * (r * md.matrix() + md.matrix() * r);
}

double mhe_rhs(const HermitianOperator& o, const StateVector& psi, const HermitianOperator& h,
               const HermitianOperator& md, double gamma_d) {
  check_square_dims(o.dim(), psi.dim(), "mhe_rhs");
  check_square_dims(h.dim(), psi.dim(), "mhe_rhs");
  check_square_dims(md.dim(), psi.dim(), "mhe_rhs");
  const CVector& v = psi.amplitudes();
  const CMatrix commutator = o.matrix() * h.matrix() - h.matrix() * o.matrix();
  const CMatrix anti = md.matrix() * o.matrix() + o.matrix() * md.matrix();
  const Complex value = v.dot(commutator * v) / Complex(0.0, 1.0) + gamma_d * v.dot(anti * v);
  return value.real();
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (const auto& [key, values] : observables) {
    if (key == name) return values;
  }
  throw std::out_of_range("Trajectory: no observable named '" + name + "'");
}

IntegrationDiverged::IntegrationDiverged(double time, Trajectory partial)
    : NumericalError("integration diverged at t = " + std::to_string(time)),
      time_(time),
      partial_(std::move(partial)) {}

Trajectory evolve(const StateVector& psi0, const HamiltonianProvider& hamiltonian,
                  const TargetRule& rule, const EvolutionSettings& settings,
                  const std::vector<NamedObservable>& observables) {
  settings.validate();
  rule.check_dim(psi0.dim());
  const double dt = settings.dt;
  const double gamma = settings.gamma_d;
  const double eps = settings.singular_guard_eps;

  Trajectory traj;
  traj.observables.reserve(observables.size());
  for (const auto& o : observables) traj.observables.emplace_back(o.name, std::vector<double>{});

  auto record = [&](double t, const CVector& v) {
    const StateVector s(v);
    traj.times.push_back(t);
    traj.norms.push_back(v.norm());
    for (std::size_t i = 0; i < observables.size(); ++i) {
      traj.observables[i].second.push_back(observables[i].eval(t, s));
    }
    traj.states.push_back(s);
  };

  std::size_t guarded_in_step = 0;
  auto deriv = [&](const CVector& v, const CMatrix& h) {
    CVector md_v;
    if (!apply_md(rule.target_for(v), v, eps, md_v)) ++guarded_in_step;
    CVector out = Complex(0.0, -1.0) * (h * v);
    if (gamma != 0.0) out += gamma * md_v;
    return out;
  };

  CMatrix h0 = hamiltonian(0.0).matrix();
  check_square_dims(static_cast<int>(h0.rows()), psi0.dim(), "evolve");
  CVector v = psi0.amplitudes();
  record(0.0, v);
  const std::size_t steps = settings.step_count();
  // The end-of-step Hamiltonian is reused as the next step's start.
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const CMatrix hm = hamiltonian(t + 0.5 * dt).matrix();
    const CMatrix h1 = hamiltonian(static_cast<double>(n + 1) * dt).matrix();
    guarded_in_step = 0;
    const CVector k1 = deriv(v, h0);
    const CVector k2 = deriv(v + (0.5 * dt) * k1, hm);
    const CVector k3 = deriv(v + (0.5 * dt) * k2, hm);
    const CVector k4 = deriv(v + dt * k3, h1);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    h0 = h1;
    if (guarded_in_step > 0) ++traj.guarded_steps;
    const double t_next = static_cast<double>(n + 1) * dt;
    if (!v.allFinite() || v.squaredNorm() == 0.0) throw IntegrationDiverged(t_next, std::move(traj));
    if (settings.renormalize_every_step) v /= v.norm();
    if ((n + 1) % settings.sample_stride == 0 || n + 1 == steps) record(t_next, v);
  }
  return traj;
}

Trajectory evolve(const StateVector& psi0, const HermitianOperator& hamiltonian,
                  const TargetRule& rule, const EvolutionSettings& settings,
                  const std::vector<NamedObservable>& observables) {
  return evolve(
      psi0, [&hamiltonian](double) { return hamiltonian; }, rule, settings, observables);
}

}  // namespace nlspin
