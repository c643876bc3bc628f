#include "nlspin/bloch.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nlspin {

namespace {

constexpr double kSphereTol = 1e-10;

Vec3 rk4_bloch_step(const Vec3& k, const OneSpinParams& p, double dt) {
  const Vec3 a = bloch_rhs(k, p);
  const Vec3 b = bloch_rhs(k + 0.5 * dt * a, p);
  const Vec3 c = bloch_rhs(k + 0.5 * dt * b, p);
  const Vec3 d = bloch_rhs(k + dt * c, p);
  return k + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d);
}

}  // namespace

BlochVector::BlochVector(const Vec3& k) : k_(k) {
  if (!k_.allFinite()) throw std::invalid_argument("BlochVector: non-finite component");
  if (k_.norm() > 1.0 + kSphereTol) {
    throw std::invalid_argument("BlochVector: |k| = " + std::to_string(k_.norm()) + " exceeds 1");
  }
}

void OneSpinParams::validate() const {
  if (!omega.allFinite()) throw std::invalid_argument("OneSpinParams: omega must be finite");
  if (std::abs(s_hat.norm() - 1.0) > tol::kAlgebraic) {
    throw std::invalid_argument("OneSpinParams: s_hat must be a unit vector");
  }
  if (!(gamma_d >= 0.0) || !std::isfinite(gamma_d)) {
    throw std::invalid_argument("OneSpinParams: gamma_d must be >= 0");
  }
}

void ThermalParams::validate() const {
  if (!std::isfinite(omega_0)) throw std::invalid_argument("ThermalParams: omega_0 must be finite");
  if (!(omega_s_sq > 0.0)) throw std::invalid_argument("ThermalParams: omega_s_sq must be > 0");
  if (!(tau_s > 0.0)) throw std::invalid_argument("ThermalParams: tau_s must be > 0");
}

BlochVector bloch_from_state(const StateVector& psi) {
  if (psi.dim() != 2) throw std::invalid_argument("bloch_from_state: expected a one-spin state");
  const Complex u = psi[0];
  const Complex d = psi[1];
  const Complex cross = std::conj(u) * d;
  Vec3 k(2.0 * cross.real(), 2.0 * cross.imag(), std::norm(u) - std::norm(d));
  // Rounding can push a pure state a few ulps outside the sphere.
  if (k.norm() > 1.0) k /= k.norm();
  return BlochVector(k);
}

StateVector state_from_bloch(const Vec3& k) {
  if (!k.allFinite() || std::abs(k.norm() - 1.0) > kSphereTol) {
    throw std::invalid_argument("state_from_bloch: |k| must equal 1");
  }
  const Vec3 n = k / k.norm();
  CVector v(2);
  if (n.z() > -0.5) {
    const double c = std::sqrt(0.5 * (1.0 + n.z()));
    v << c, Complex(n.x(), n.y()) / (2.0 * c);
  } else {
    const double s = std::sqrt(0.5 * (1.0 - n.z()));
    v << Complex(n.x(), -n.y()) / (2.0 * s), s;
  }
  return StateVector(v);
}

CVector spin_target(const Vec3& s_hat) { return state_from_bloch(s_hat).amplitudes(); }

HermitianOperator one_spin_hamiltonian(const Vec3& omega) { return pauli_dot(omega); }

Vec3 bloch_rhs(const Vec3& k, const OneSpinParams& p, double guard_eps) {
  const double sk = p.s_hat.dot(k);
  Vec3 out = 2.0 * p.omega.cross(k);
  if (p.gamma_d == 0.0) return out;
  if (sk >= 1.0 - guard_eps) {
    throw SingularPoint("bloch_rhs: s_hat . k = " + std::to_string(sk) + " reaches the target");
  }
  out += p.gamma_d * (sk * k - p.s_hat) / std::sqrt(0.5 * (1.0 - sk));
  return out;
}

std::pair<BlochVector, BlochVector> fixed_point_weak(const OneSpinParams& p) {
  p.validate();
  const double w = p.omega.norm();
  if (w == 0.0) throw std::invalid_argument("fixed_point_weak: omega must be nonzero");
  const Vec3 w_hat = p.omega / w;
  const double divisor = 2.0 * (1.0 - p.s_hat.dot(w_hat));
  if (divisor < tol::kAlgebraic) {
    throw std::domain_error("fixed_point_weak: degenerate geometry, s_hat parallel to omega");
  }
  const Vec3 v = w_hat + (p.gamma_d / w) / std::sqrt(divisor) * p.s_hat.cross(w_hat);
  const Vec3 u = v.normalized();
  return {BlochVector(u), BlochVector(-u)};
}

BlochVector fixed_point_strong(const OneSpinParams& p) {
  p.validate();
  if (p.gamma_d == 0.0) throw std::invalid_argument("fixed_point_strong: gamma_d must be > 0");
  const double w = p.omega.norm();
  if (w == 0.0) return BlochVector(-p.s_hat);
  const Vec3 w_hat = p.omega / w;
  const Vec3 v = -p.s_hat + 2.0 * (w / p.gamma_d) * p.s_hat.cross(w_hat);
  return BlochVector(v.normalized());
}

RelaxationRates relaxation_rates(const ThermalParams& tp) {
  tp.validate();
  const double tau = tp.tau_s;
  const double longitudinal =
      2.0 * tp.omega_s_sq * tau / (1.0 + tp.omega_0 * tp.omega_0 * tau * tau);
  return {longitudinal, 0.5 * longitudinal + tp.omega_s_sq * tau};
}

double thermal_steady_state(double gamma_d, double t_s1) {
  const double x = gamma_d * t_s1;
  if (x == 0.0) return 0.0;
  return -1.0 + 1.0 / (1.0 + 2.0 * x);
}

double effective_temperature(double gamma_d, double t_s1) {
  const double x = gamma_d * t_s1;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * std::atanh(1.0 - 1.0 / (1.0 + 2.0 * x)));
}

double augmented_kpar_rhs(const Vec3& k, const OneSpinParams& p, double t_s1, double guard_eps) {
  const double w = p.omega.norm();
  if (w > 0.0 && std::hypot(p.omega.x(), p.omega.y()) > tol::kAlgebraic * w) {
    throw std::invalid_argument("augmented_kpar_rhs: omega must point along z");
  }
  if (!(t_s1 > 0.0)) throw std::invalid_argument("augmented_kpar_rhs: T_s1 must be > 0");
  const Vec3& s = p.s_hat;
  double drift = 0.0;
  if (p.gamma_d != 0.0) {
    const double sk = s.dot(k);
    if (sk >= 1.0 - guard_eps) throw SingularPoint("augmented_kpar_rhs: s_hat . k reaches the target");
    drift = p.gamma_d * ((s.x() * k.x() + s.y() * k.y()) * k.z() + s.z() * (k.z() * k.z() - 1.0)) /
            std::sqrt(0.5 * (1.0 - sk));
  }
  return drift - k.z() / t_s1;
}

BlochPath integrate_bloch(const Vec3& k0, const OneSpinParams& p, double dt, double t_final,
                          std::size_t stride) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_bloch: dt must be > 0");
  if (stride == 0) throw std::invalid_argument("integrate_bloch: stride must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
  BlochPath path;
  Vec3 k = k0;
  path.times.push_back(0.0);
  path.k.push_back(k);
  for (std::size_t n = 0; n < steps; ++n) {
    k = rk4_bloch_step(k, p, dt);
    if ((n + 1) % stride == 0 || n + 1 == steps) {
      path.times.push_back(static_cast<double>(n + 1) * dt);
      path.k.push_back(k);
    }
  }
  return path;
}

RelaxedFixedPoint relax_fixed_point(const Vec3& k0, const OneSpinParams& p, double dt,
                                    double max_time, double tol) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("relax_fixed_point: dt must be > 0");
  Vec3 k = k0.normalized();
  double t = 0.0;
  double residual = bloch_rhs(k, p).norm();
  while (residual >= tol && t < max_time) {
    k = rk4_bloch_step(k, p, dt).normalized();
    t += dt;
    residual = bloch_rhs(k, p).norm();
  }
  return {BlochVector(k), residual, t, residual < tol};
}

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace nlspin
