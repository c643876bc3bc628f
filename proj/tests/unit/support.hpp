#pragma once

#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "nlspin/hilbert.hpp"

namespace testing {

using nlspin::CMatrix;
using nlspin::Complex;
using nlspin::CVector;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(12345);
  return engine;
}

inline double normal() {
  static boost::random::normal_distribution<double> dist;
  return dist(rng());
}

inline CVector random_vector(int dim) {
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(normal(), normal());
  return v;
}

inline nlspin::StateVector random_state(int dim) { return nlspin::StateVector(random_vector(dim)); }

inline CMatrix random_hermitian_matrix(int dim) {
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(normal(), normal());
  }
  CMatrix h = 0.5 * (a + a.adjoint());
  return h;
}

inline nlspin::HermitianOperator random_hermitian(int dim) {
  return nlspin::HermitianOperator(random_hermitian_matrix(dim));
}

inline nlspin::Vec3 random_unit3() {
  nlspin::Vec3 v(normal(), normal(), normal());
  return v.normalized();
}

}  // namespace testing
