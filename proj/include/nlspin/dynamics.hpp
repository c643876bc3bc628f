#pragma once

// The modified Schrodinger equation
//
//   d|psi>/dt = (-i H + gamma_D M_D) |psi>,
//   M_D = -sqrt(<Psi|Psi> / (1 - <P>)) (P - <P>),   P = |Psi><Psi| / <Psi|Psi>,
//
// with hbar = 1 (H in angular-frequency units), together with the master- and
// Heisenberg-equation forms used as cross-checks.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlspin/hilbert.hpp"

namespace nlspin {

inline constexpr double kDefaultGuardEps = 1e-12;

/// Chooses the target vector |Psi> that defines M_D.
class TargetRule {
 public:
  /// A fixed, possibly unnormalized, nonzero target.
  static TargetRule fixed(const CVector& target);
  /// The two-spin rule: |Psi> = (d*, -c*, -b*, a*) rebuilt from the current state.
  static TargetRule spin_flip();

  bool is_spin_flip() const { return std::holds_alternative<SpinFlip>(rule_); }
  /// Throws std::invalid_argument if the rule cannot act on dimension `dim`.
  void check_dim(int dim) const;
  /// Target for the (possibly unnormalized) current amplitudes.
  CVector target_for(const CVector& psi) const;

 private:
  struct Fixed {
    CVector target;
  };
  struct SpinFlip {};
  explicit TargetRule(std::variant<Fixed, SpinFlip> rule) : rule_(std::move(rule)) {}

  std::variant<Fixed, SpinFlip> rule_;
};

struct EvolutionSettings {
  double dt = 1e-3;
  double t_final = 1.0;
  double gamma_d = 0.0;
  bool renormalize_every_step = true;
  double singular_guard_eps = kDefaultGuardEps;
  /// Record every `sample_stride`-th step (the initial state is always recorded).
  std::size_t sample_stride = 1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  std::size_t step_count() const;
};

struct MdOperator {
  HermitianOperator op;
  /// True when 1 - <P> fell below the guard threshold and M_D was zeroed.
  bool guarded = false;
};

/// Builds M_D for target `target` at state `psi`.
MdOperator build_md(const CVector& target, const StateVector& psi,
                    double guard_eps = kDefaultGuardEps);

struct MseDerivative {
  CVector value;
  bool guarded = false;
};

/// Right-hand side of the modified Schrodinger equation.
MseDerivative mse_rhs(const StateVector& psi, const HermitianOperator& h, const TargetRule& rule,
                      double gamma_d, double guard_eps = kDefaultGuardEps);

/// Right-hand side of the modified master equation: [H, rho]/i + gamma_D (rho M_D + M_D rho).
CMatrix mme_rhs(const DensityOperator& rho, const HermitianOperator& h, const HermitianOperator& md,
                double gamma_d);

/// Modified Heisenberg equation: <[O, H]>/i + gamma_D <M_D O + O M_D>.
double mhe_rhs(const HermitianOperator& o, const StateVector& psi, const HermitianOperator& h,
               const HermitianOperator& md, double gamma_d);

using HamiltonianProvider = std::function<HermitianOperator(double t)>;

struct NamedObservable {
  std::string name;
  std::function<double(double t, const StateVector& psi)> eval;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  /// Norm of the integrated vector before any renormalization, per sample.
  std::vector<double> norms;
  std::vector<std::pair<std::string, std::vector<double>>> observables;
  std::size_t guarded_steps = 0;

  const std::vector<double>& series(const std::string& name) const;
};

/// Raised when the integrated amplitudes stop being finite. Carries the
/// samples recorded before the failure.
class IntegrationDiverged : public NumericalError {
 public:
  IntegrationDiverged(double time, Trajectory partial);
  double time() const { return time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

/// Fixed-step classic RK4 integration of the modified Schrodinger equation.
/// The provider is sampled at t, t + dt/2 and t + dt of every step.
Trajectory evolve(const StateVector& psi0, const HamiltonianProvider& hamiltonian,
                  const TargetRule& rule, const EvolutionSettings& settings,
                  const std::vector<NamedObservable>& observables = {});

Trajectory evolve(const StateVector& psi0, const HermitianOperator& hamiltonian,
                  const TargetRule& rule, const EvolutionSettings& settings,
                  const std::vector<NamedObservable>& observables = {});

}  // namespace nlspin
