#include "nlspin/two_spin.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlspin {

namespace {

const HermitianOperator& axis_pauli(Axis axis) {
  static const std::array<HermitianOperator, 3> paulis{sigma_x(), sigma_y(), sigma_z()};
  return paulis[static_cast<std::size_t>(axis)];
}

void check_spin(Spin which) {
  if (which != Spin::kOne && which != Spin::kTwo) {
    throw std::invalid_argument("spin index must be 1 or 2");
  }
}

}  // namespace

TwoSpinState::TwoSpinState(StateVector psi) : psi_(std::move(psi)) {
  if (psi_.dim() != 4) throw std::invalid_argument("TwoSpinState: expected a 4-dimensional state");
}

HermitianOperator spin_operator(Spin which, Axis axis) {
  check_spin(which);
  return embed(axis_pauli(axis), which);
}

HermitianOperator spin_projection_op(Spin which, double theta, double phi) {
  check_spin(which);
  const Vec3 u(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  return embed(pauli_dot(u), which);
}

SpinExpectations spin_expectations(const TwoSpinState& psi) {
  SpinExpectations out;
  for (int i = 0; i < 3; ++i) {
    const auto axis = static_cast<Axis>(i);
    out.s1[i] = expectation(spin_operator(Spin::kOne, axis), psi.state());
    out.s2[i] = expectation(spin_operator(Spin::kTwo, axis), psi.state());
  }
  return out;
}

Complex entanglement_E(const TwoSpinState& psi) { return psi.a() * psi.d() - psi.b() * psi.c(); }

double purity(const TwoSpinState& psi) { return 1.0 - 2.0 * std::norm(entanglement_E(psi)); }

TwoSpinState symmetric_state(double theta_psi, double phi_alpha, double phi_beta) {
  const double c = std::cos(0.5 * theta_psi) / std::numbers::sqrt2;
  const double s = std::sin(0.5 * theta_psi) / std::numbers::sqrt2;
  const Complex i(0.0, 1.0);
  CVector v(4);
  v << c * std::polar(1.0, -0.5 * phi_alpha), i * s * std::polar(1.0, -0.5 * phi_beta),
      i * s * std::polar(1.0, 0.5 * phi_beta), c * std::polar(1.0, 0.5 * phi_alpha);
  return TwoSpinState(v);
}

double r_expectation(const TwoSpinState& psi) {
  const Complex a = psi.a(), b = psi.b(), c = psi.c(), d = psi.d();
  const Complex e = a * d - b * c;
  const Complex bc2 = std::conj(b) * std::conj(b) + std::conj(c) * std::conj(c);
  return 4.0 * (std::norm(a * d) - std::norm(b * c)) - 4.0 * (bc2 * e).real();
}

double r_expectation_operator(const TwoSpinState& psi) {
  double s1_dot_s2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto axis = static_cast<Axis>(i);
    const CMatrix prod = spin_operator(Spin::kOne, axis).matrix() * spin_operator(Spin::kTwo, axis).matrix();
    s1_dot_s2 += expectation(HermitianOperator(prod), psi.state());
  }
  const SpinExpectations s = spin_expectations(psi);
  return s1_dot_s2 - s.s1.dot(s.s2);
}

StateVector spin_flip_target(const TwoSpinState& psi) {
  return StateVector(TargetRule::spin_flip().target_for(psi.state().amplitudes()));
}

TwoSpinState bell_singlet() {
  CVector v(4);
  v << 0.0, 1.0, -1.0, 0.0;
  return TwoSpinState(v);
}

TwoSpinState bell_triplet() {
  CVector v(4);
  v << 0.0, 1.0, 1.0, 0.0;
  return TwoSpinState(v);
}

std::vector<NamedObservable> two_spin_observables() {
  std::vector<NamedObservable> obs;
  const char* names1[3] = {"s1_x", "s1_y", "s1_z"};
  const char* names2[3] = {"s2_x", "s2_y", "s2_z"};
  for (int i = 0; i < 3; ++i) {
    const auto axis = static_cast<Axis>(i);
    obs.push_back({names1[i], [op = spin_operator(Spin::kOne, axis)](double, const StateVector& s) {
                     return expectation(op, s);
                   }});
  }
  for (int i = 0; i < 3; ++i) {
    const auto axis = static_cast<Axis>(i);
    obs.push_back({names2[i], [op = spin_operator(Spin::kTwo, axis)](double, const StateVector& s) {
                     return expectation(op, s);
                   }});
  }
  obs.push_back({"purity", [](double, const StateVector& s) { return purity(TwoSpinState(s)); }});
  obs.push_back(
      {"abs_e", [](double, const StateVector& s) { return std::abs(entanglement_E(TwoSpinState(s))); }});
  obs.push_back({"r", [](double, const StateVector& s) { return r_expectation(TwoSpinState(s)); }});
  return obs;
}

ButterflyResult butterfly_run(double epsilon, const TwoSpinState& psi_p, BellBase base,
                              const EvolutionSettings& settings) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("butterfly_run: epsilon must be >= 0");
  }
  const TwoSpinState psi0 = base == BellBase::kSinglet ? bell_singlet() : bell_triplet();
  const TwoSpinState start(CVector(psi0.state().amplitudes() + epsilon * psi_p.state().amplitudes()));

  ButterflyReport report;
  const StateVector& s = start.state();
  const auto sx1 = expectation(spin_operator(Spin::kOne, Axis::kX), s);
  const auto sy1 = expectation(spin_operator(Spin::kOne, Axis::kY), s);
  const auto sx2 = expectation(spin_operator(Spin::kTwo, Axis::kX), s);
  const auto sy2 = expectation(spin_operator(Spin::kTwo, Axis::kY), s);
  report.s1_plus = {sx1, sy1};
  report.s2_plus = {sx2, sy2};
  report.s1_z = expectation(spin_operator(Spin::kOne, Axis::kZ), s);
  report.s2_z = expectation(spin_operator(Spin::kTwo, Axis::kZ), s);
  if (base == BellBase::kSinglet) {
    const Complex alpha = psi_p.a(), beta = psi_p.b(), gamma = psi_p.c(), delta = psi_p.d();
    report.s_plus_first_order = std::numbers::sqrt2 * (delta - std::conj(alpha)) * epsilon;
    report.s_z_first_order = (2.0 * beta.real() + 2.0 * gamma.real()) * epsilon / std::numbers::sqrt2;
  }
  const double overlap = std::norm(2.0 * entanglement_E(start));  // <P> for the spin-flip target
  report.guarded_stationary = 1.0 - overlap < settings.singular_guard_eps;

  Trajectory traj = evolve(start.state(), HermitianOperator::zero(4), TargetRule::spin_flip(), settings,
                           two_spin_observables());
  return {std::move(traj), report};
}

void DrivenParams::validate() const {
  if (!std::isfinite(omega_a) || !std::isfinite(omega_1) || !std::isfinite(delta) || !std::isfinite(g)) {
    throw std::invalid_argument("DrivenParams: parameters must be finite");
  }
}

HermitianOperator omega_matrix(const DrivenParams& p) {
  p.validate();
  const double wa = p.omega_a, w1 = p.omega_1, dl = p.delta, g = p.g;
  CMatrix m(4, 4);
  m << (wa + dl) / 2, w1 / 2, g / 2, 0.0,
       w1 / 2, (wa - dl) / 2, 0.0, -g / 2,
       g / 2, 0.0, (-wa + dl) / 2, w1 / 2,
       0.0, -g / 2, w1 / 2, (-wa - dl) / 2;
  return HermitianOperator(m);
}

double rabi_frequency(const DrivenParams& p) { return std::hypot(p.omega_1, p.delta); }

double hartmann_hahn_mismatch(const DrivenParams& p) { return p.omega_a - rabi_frequency(p); }

}  // namespace nlspin
