#include <doctest.h>

#include <cmath>
#include <limits>

#include "nlspin/bloch.hpp"
#include "nlspin/dynamics.hpp"
#include "support.hpp"

using namespace nlspin;

namespace {

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

// Component-wise expansion of 2 w x k + g [(s.k) k - s] / sqrt((1 - s.k)/2).
Vec3 rhs_oracle(const Vec3& k, const Vec3& w, const Vec3& s, double g) {
  const double sk = s[0] * k[0] + s[1] * k[1] + s[2] * k[2];
  const double d = std::sqrt((1.0 - sk) / 2.0);
  Vec3 out;
  out[0] = 2.0 * (w[1] * k[2] - w[2] * k[1]) + g * (sk * k[0] - s[0]) / d;
  out[1] = 2.0 * (w[2] * k[0] - w[0] * k[2]) + g * (sk * k[1] - s[1]) / d;
  out[2] = 2.0 * (w[0] * k[1] - w[1] * k[0]) + g * (sk * k[2] - s[2]) / d;
  return out;
}

OneSpinParams params(const Vec3& w, const Vec3& s, double g) {
  OneSpinParams p;
  p.omega = w;
  p.s_hat = s;
  p.gamma_d = g;
  return p;
}

}  // namespace

TEST_CASE("Bloch vector of simple states") {
  CHECK((bloch_from_state(StateVector(vec2(1.0, 0.0))).k() - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((bloch_from_state(StateVector(vec2(1.0, 1.0))).k() - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(BlochVector(Vec3(1.0, 1.0, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(state_from_bloch(Vec3(0.5, 0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("Bloch round trip") {
  for (int trial = 0; trial < 200; ++trial) {
    const StateVector psi = testing::random_state(2);
    const Vec3 k = bloch_from_state(psi).k();
    CHECK(std::abs(k.norm() - 1.0) < 1e-12);
    CHECK((bloch_from_state(state_from_bloch(k)).k() - k).norm() < 1e-12);
  }
  // The south pole branch.
  const Vec3 south(0, 0, -1);
  CHECK((bloch_from_state(state_from_bloch(south)).k() - south).norm() < 1e-15);
}

TEST_CASE("spin target has Bloch vector s") {
  const Vec3 s = testing::random_unit3();
  CHECK((bloch_from_state(StateVector(spin_target(s))).k() - s).norm() < 1e-12);
}

TEST_CASE("bloch_rhs") {
  const Vec3 s = testing::random_unit3();
  CHECK(bloch_rhs(-s, params(2.0 * s, s, 0.7)).norm() < 1e-14);
  CHECK_THROWS_AS(bloch_rhs(s, params(Vec3::Zero(), s, 0.7)), SingularPoint);

  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 k = testing::random_unit3();
    const Vec3 w = testing::random_unit3() * (0.1 + trial * 0.05);
    const Vec3 sh = testing::random_unit3();
    const double g = 0.01 * trial;
    const Vec3 rhs = bloch_rhs(k, params(w, sh, g));
    CHECK(std::abs(rhs.dot(k)) < 1e-12 * std::max(1.0, rhs.norm()));
    CHECK((rhs - rhs_oracle(k, w, sh, g)).norm() < 1e-12 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("weak fixed point formula") {
  const Vec3 w(0, 0, 2.0);
  const Vec3 s(1, 0, 0);
  auto [plus, minus] = fixed_point_weak(params(w, s, 0.0));
  CHECK((plus.k() - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((minus.k() - Vec3(0, 0, -1)).norm() < 1e-15);

  // gamma/|w| = 0.25 at right angles: direction of w-hat + 0.25 2^{-1/2} s x w-hat.
  std::tie(plus, minus) = fixed_point_weak(params(w, s, 0.5));
  const Vec3 raw = Vec3(0, 0, 1) + 0.25 / std::sqrt(2.0) * s.cross(Vec3(0, 0, 1));
  CHECK((plus.k() - raw.normalized()).norm() < 1e-15);
  CHECK((minus.k() + raw.normalized()).norm() < 1e-15);

  CHECK_THROWS_AS(fixed_point_weak(params(w, Vec3(0, 0, 1), 0.1)), std::domain_error);
}

TEST_CASE("relaxed fixed point agrees with the weak formula at gamma/|w| = 0.05") {
  const Vec3 w(0, 0, 1);
  const Vec3 s = Vec3(0.6, 0.0, -0.8);
  const OneSpinParams p = params(w, s, 0.05);
  const RelaxedFixedPoint fp = relax_fixed_point(Vec3(1, 0, 0), p, 1e-2, 2000.0);
  CHECK(fp.converged);
  const auto [plus, minus] = fixed_point_weak(p);
  CHECK(std::min(angle_between(fp.k.k(), plus.k()), angle_between(fp.k.k(), minus.k())) < 0.01);
}

TEST_CASE("strong fixed point formula") {
  const Vec3 s(1, 0, 0);
  CHECK((fixed_point_strong(params(Vec3::Zero(), s, 3.0)).k() + s).norm() < 1e-15);
  const Vec3 w(0, 0, 1);
  const Vec3 raw = -s + 0.08 * s.cross(w);
  CHECK((fixed_point_strong(params(w, s, 25.0)).k() - raw.normalized()).norm() < 1e-15);
  CHECK_THROWS_AS(fixed_point_strong(params(w, s, 0.0)), std::invalid_argument);
}

TEST_CASE("long-time state-vector evolution at gamma/|w| = 100 matches the strong formula") {
  const Vec3 w(0, 0, 0.5);
  const Vec3 s(1, 0, 0);
  EvolutionSettings st;
  st.gamma_d = 50.0;
  st.dt = 1e-4;
  st.t_final = 2.0;
  st.sample_stride = 20000;
  const Trajectory traj =
      evolve(state_from_bloch(Vec3(0, 1, 0)), one_spin_hamiltonian(w), TargetRule::fixed(spin_target(s)), st);
  const Vec3 k = bloch_from_state(traj.states.back()).k();
  CHECK(angle_between(k, fixed_point_strong(params(w, s, st.gamma_d)).k()) < 0.02);
}

TEST_CASE("relaxation rates") {
  ThermalParams tp{0.0, 2.0, 0.5};
  CHECK(relaxation_rates(tp).longitudinal == doctest::Approx(2.0 * 2.0 * 0.5));
  tp = {10.0, 10.0, 5.0};
  const RelaxationRates r = relaxation_rates(tp);
  CHECK(r.longitudinal == doctest::Approx(100.0 / 2501.0).epsilon(1e-14));
  CHECK(r.transverse == doctest::Approx(50.0 / 2501.0 + 50.0).epsilon(1e-14));
  for (int i = 0; i < 50; ++i) {
    const ThermalParams q{testing::normal() * 5, std::abs(testing::normal()) + 0.1, std::abs(testing::normal()) + 0.1};
    const RelaxationRates rr = relaxation_rates(q);
    CHECK(rr.transverse >= 0.5 * rr.longitudinal);
  }
}

TEST_CASE("thermal steady state and effective temperature") {
  CHECK(thermal_steady_state(5.0, 2501.0 / 100.0) == doctest::Approx(-0.99602).epsilon(1e-5));
  CHECK(thermal_steady_state(1e9, 1e9) == doctest::Approx(-1.0));
  CHECK(thermal_steady_state(0.0, 10.0) == 0.0);
  double previous = 1.0;
  for (double x = 0.01; x < 100.0; x *= 1.5) {
    const double k = thermal_steady_state(x, 1.0);
    CHECK(k < previous);
    previous = k;
  }
  CHECK(effective_temperature(0.0, 5.0) == std::numeric_limits<double>::infinity());
  // k = -tanh(1 / (2 T)) is the equilibrium polarization at temperature T.
  const double t = effective_temperature(5.0, 25.01);
  CHECK(std::tanh(0.5 / t) == doctest::Approx(-thermal_steady_state(5.0, 25.01)).epsilon(1e-12));
}

TEST_CASE("augmented longitudinal drift") {
  const Vec3 w(0, 0, 3.0);
  const OneSpinParams p = params(w, Vec3(0.6, 0.0, 0.8), 0.4);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(std::abs(augmented_kpar_rhs(Vec3(0, 0, -1), p, inf)) < 1e-15);
  // +w-hat is the singular point only when s = z; with this s the drift there vanishes too.
  CHECK(std::abs(augmented_kpar_rhs(Vec3(0, 0, 1), p, inf)) < 1e-15);

  // Linearized steady state near k = -z with s = z: -2 g (1 + k) - k / T = 0.
  const double g = 5.0, t1 = 25.01;
  const double k_star = -2.0 * g * t1 / (1.0 + 2.0 * g * t1);
  CHECK(k_star == doctest::Approx(thermal_steady_state(g, t1)).epsilon(1e-14));

  // With s_z > 0 and no relaxation the drift pushes k_z toward -1.
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 k = testing::random_unit3();
    if (std::abs(k.z()) > 0.99) continue;
    CHECK(augmented_kpar_rhs(k, params(w, Vec3(0, 0, 1), 0.4), inf) < 0.0);
  }
  CHECK_THROWS_AS(augmented_kpar_rhs(Vec3(1, 0, 0), params(Vec3(1, 0, 0), Vec3(0, 0, 1), 0.4), 1.0),
                  std::invalid_argument);
}

TEST_CASE("Bloch ODE and state-vector evolution agree") {
  const Vec3 w = Vec3(0.3, -0.2, 1.0);
  const Vec3 s = testing::random_unit3();
  const OneSpinParams p = params(w, s, 0.25 * w.norm());
  Vec3 k0 = -s + 0.5 * testing::random_unit3();
  k0.normalize();
  EvolutionSettings st;
  st.gamma_d = p.gamma_d;
  st.dt = 1e-3;
  st.t_final = 10.0;
  const Trajectory traj = evolve(state_from_bloch(k0), one_spin_hamiltonian(w), TargetRule::fixed(spin_target(s)), st);
  const BlochPath path = integrate_bloch(k0, p, st.dt, st.t_final);
  REQUIRE(path.k.size() == traj.states.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < path.k.size(); ++i) {
    sup = std::max(sup, (bloch_from_state(traj.states[i]).k() - path.k[i]).norm());
    CHECK(std::abs(path.k[i].norm() - 1.0) < 1e-8);
  }
  CHECK(sup < 1e-6);
}

TEST_CASE("sign law for weak damping") {
  const Vec3 w(0, 0, 1);
  for (const double sz : {-0.6, 0.6}) {
    const Vec3 s(0.8, 0.0, sz);
    const RelaxedFixedPoint fp = relax_fixed_point(Vec3(1, 0, 0), params(w, s, 0.05), 1e-2, 3000.0);
    CHECK(fp.k.z() * sz < 0.0);
    CHECK(std::abs(fp.k.z()) > 0.99);
  }
}
