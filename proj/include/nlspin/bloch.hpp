#pragma once

// One-spin reduced dynamics on the Bloch sphere, rho = (1 + k . sigma) / 2,
// for H = omega . sigma and the fixed target |Psi> = +1 eigenvector of
// s_hat . sigma.

#include <stdexcept>
#include <utility>
#include <vector>

#include "nlspin/hilbert.hpp"

namespace nlspin {

class BlochVector {
 public:
  /// Throws std::invalid_argument when |k| > 1 + 1e-10 or k is not finite.
  explicit BlochVector(const Vec3& k);

  const Vec3& k() const { return k_; }
  double x() const { return k_.x(); }
  double y() const { return k_.y(); }
  double z() const { return k_.z(); }
  double length() const { return k_.norm(); }

 private:
  Vec3 k_;
};

struct OneSpinParams {
  Vec3 omega = Vec3::Zero();
  Vec3 s_hat = Vec3::UnitZ();
  double gamma_d = 0.0;

  void validate() const;
};

struct ThermalParams {
  double omega_0 = 0.0;
  double omega_s_sq = 1.0;
  double tau_s = 1.0;

  void validate() const;
};

struct RelaxationRates {
  double longitudinal;  // 1 / T_s1
  double transverse;    // 1 / T_s2
};

/// The rhs is undefined at s_hat . k = 1, where the target is reached.
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

BlochVector bloch_from_state(const StateVector& psi);
/// Inverse map for pure states; throws std::invalid_argument unless |k| = 1.
StateVector state_from_bloch(const Vec3& k);

/// The +1 eigenvector of s_hat . sigma, used as the fixed target.
CVector spin_target(const Vec3& s_hat);
HermitianOperator one_spin_hamiltonian(const Vec3& omega);

/// dk/dt = 2 omega x k + gamma_D [(s.k) k - s] / sqrt((1 - s.k) / 2).
Vec3 bloch_rhs(const Vec3& k, const OneSpinParams& p, double guard_eps = 1e-12);

/// First-order fixed points for gamma_D << |omega|:
/// +-(w + (gamma_D/|omega|) (2 (1 - s.w))^(-1/2) s x w), w = omega/|omega|.
std::pair<BlochVector, BlochVector> fixed_point_weak(const OneSpinParams& p);

/// Fixed point for gamma_D >> |omega|: -s + 2 (|omega|/gamma_D) s x w.
BlochVector fixed_point_strong(const OneSpinParams& p);

RelaxationRates relaxation_rates(const ThermalParams& tp);

/// k_par = -1 + 1 / (1 + 2 gamma_D T_s1).
double thermal_steady_state(double gamma_d, double t_s1);

/// Effective temperature in units of hbar omega_0 / k_B; +infinity when
/// gamma_D T_s1 = 0.
double effective_temperature(double gamma_d, double t_s1);

/// Longitudinal drift for omega along z plus the relaxation term -k_z / T_s1.
double augmented_kpar_rhs(const Vec3& k, const OneSpinParams& p, double t_s1,
                          double guard_eps = 1e-12);

struct BlochPath {
  std::vector<double> times;
  std::vector<Vec3> k;
};

/// RK4 integration of bloch_rhs with fixed step, sampled every `stride` steps.
BlochPath integrate_bloch(const Vec3& k0, const OneSpinParams& p, double dt, double t_final,
                          std::size_t stride = 1);

struct RelaxedFixedPoint {
  BlochVector k;
  double residual;  // |rhs| at the returned point
  double time;      // simulated time spent
  bool converged;
};

/// Integrates bloch_rhs on the sphere until |rhs| < tol or max_time elapses.
RelaxedFixedPoint relax_fixed_point(const Vec3& k0, const OneSpinParams& p, double dt,
                                    double max_time, double tol = 1e-9);

/// Angle in radians between two nonzero vectors.
double angle_between(const Vec3& a, const Vec3& b);

}  // namespace nlspin
