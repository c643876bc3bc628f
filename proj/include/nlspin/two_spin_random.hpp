#pragma once

// Template definitions for the random two-spin state generators declared in
// two_spin.hpp.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace nlspin {

namespace detail {

template <class Engine>
Eigen::Matrix2cd random_su2(Engine& engine) {
  boost::random::normal_distribution<double> normal;
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) g[i] = normal(engine);
  g.normalize();
  const Complex alpha(g[0], g[1]);
  const Complex beta(g[2], g[3]);
  Eigen::Matrix2cd u;
  u << alpha, -std::conj(beta), beta, std::conj(alpha);
  return u;
}

}  // namespace detail

template <class Engine>
TwoSpinState random_state_with_entanglement(double e_abs, Engine& engine) {
  if (!(e_abs >= 0.0) || e_abs > 0.5) {
    throw std::invalid_argument("random_state_with_entanglement: |E| must lie in [0, 1/2]");
  }
  const double chi = 0.5 * std::asin(2.0 * e_abs);
  // Amplitudes as a 2x2 matrix M[s1][s2]; local unitaries act as U1 M U2^T
  // and leave det M = ad - bc unchanged.
  Eigen::Matrix2cd m;
  m << std::cos(chi), 0.0, 0.0, std::sin(chi);
  const Eigen::Matrix2cd u1 = detail::random_su2(engine);
  const Eigen::Matrix2cd u2 = detail::random_su2(engine);
  boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const Complex global = std::polar(1.0, phase(engine));
  const Eigen::Matrix2cd out = global * (u1 * m * u2.transpose());
  CVector v(4);
  v << out(0, 0), out(0, 1), out(1, 0), out(1, 1);
  return TwoSpinState(v);
}

template <class Engine>
TwoSpinState random_two_spin_state(Engine& engine) {
  boost::random::normal_distribution<double> normal;
  CVector v(4);
  for (int i = 0; i < 4; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    v[i] = Complex(re, im);
  }
  return TwoSpinState(v);
}

}  // namespace nlspin
