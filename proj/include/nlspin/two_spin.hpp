#pragma once

// Two spin-1/2 observables in the basis |++>, |+->, |-+>, |--> with
// amplitudes a, b, c, d. Spin operators are in units of hbar/2, so their
// matrices are Pauli matrices embedded on the relevant factor.

#include <optional>
#include <vector>

#include "nlspin/dynamics.hpp"
#include "nlspin/hilbert.hpp"

namespace nlspin {

/// Read-only view of a normalized two-spin state.
class TwoSpinState {
 public:
  /// Throws std::invalid_argument unless `psi` has dimension 4.
  explicit TwoSpinState(StateVector psi);
  explicit TwoSpinState(const CVector& amplitudes) : TwoSpinState(StateVector(amplitudes)) {}

  const StateVector& state() const { return psi_; }
  Complex a() const { return psi_[0]; }
  Complex b() const { return psi_[1]; }
  Complex c() const { return psi_[2]; }
  Complex d() const { return psi_[3]; }

 private:
  StateVector psi_;
};

enum class Axis { kX, kY, kZ };

/// Axis component of spin 1 or spin 2 as a 4x4 operator.
HermitianOperator spin_operator(Spin which, Axis axis);

/// S_n . u for u = (sin t cos p, sin t sin p, cos t).
HermitianOperator spin_projection_op(Spin which, double theta, double phi);

struct SpinExpectations {
  Vec3 s1;
  Vec3 s2;
};

SpinExpectations spin_expectations(const TwoSpinState& psi);

/// E = ad - bc.
Complex entanglement_E(const TwoSpinState& psi);
/// Single-spin purity P = 1 - 2 |E|^2.
double purity(const TwoSpinState& psi);

/// The family of states with <S1> = <S2> = 0.
TwoSpinState symmetric_state(double theta_psi, double phi_alpha, double phi_beta);

/// <R> = <S1 . S2> - <S1> . <S2> from the closed form in a, b, c, d.
double r_expectation(const TwoSpinState& psi);
/// Same quantity from operator expectations.
double r_expectation_operator(const TwoSpinState& psi);

/// |Psi> = (d*, -c*, -b*, a*), so that <Psi|psi> = 2 (ad - bc).
StateVector spin_flip_target(const TwoSpinState& psi);

TwoSpinState bell_singlet();
TwoSpinState bell_triplet();

/// Random normalized state with |ad - bc| = e_abs (0 <= e_abs <= 1/2),
/// built from a Schmidt form and random local unitaries.
template <class Engine>
TwoSpinState random_state_with_entanglement(double e_abs, Engine& engine);

/// Uniformly random normalized state.
template <class Engine>
TwoSpinState random_two_spin_state(Engine& engine);

/// Samples S1x..z, S2x..z, purity, |E| and <R>, named
/// s1_x, s1_y, s1_z, s2_x, s2_y, s2_z, purity, abs_e, r.
std::vector<NamedObservable> two_spin_observables();

enum class BellBase { kSinglet, kTriplet };

struct ButterflyReport {
  Complex s1_plus;
  Complex s2_plus;
  double s1_z;
  double s2_z;
  /// First-order predictions for <S1+> = -<S2+> and <S1z> = -<S2z>; only
  /// available for the singlet base.
  std::optional<Complex> s_plus_first_order;
  std::optional<double> s_z_first_order;
  /// True when the start is fully entangled (epsilon = 0 on the singlet),
  /// where the singular guard holds the state fixed.
  bool guarded_stationary = false;
};

struct ButterflyResult {
  Trajectory trajectory;
  ButterflyReport report;
};

/// Evolves (|base> + epsilon |psi_p>) normalized with H = 0 under the
/// spin-flip rule. Samples the two_spin_observables() series.
ButterflyResult butterfly_run(double epsilon, const TwoSpinState& psi_p, BellBase base,
                              const EvolutionSettings& settings);

struct DrivenParams {
  double omega_a = 0.0;
  double omega_1 = 0.0;
  double delta = 0.0;
  double g = 0.0;

  void validate() const;
};

/// Rotating-frame Hamiltonian (angular-frequency units) of the driven pair;
/// spin a is spin 1 and the driven spin b is spin 2.
HermitianOperator omega_matrix(const DrivenParams& p);

/// sqrt(omega_1^2 + delta^2).
double rabi_frequency(const DrivenParams& p);
/// omega_a - omega_R; zero at Hartmann-Hahn matching.
double hartmann_hahn_mismatch(const DrivenParams& p);

}  // namespace nlspin

#include "nlspin/two_spin_random.hpp"
