#include <doctest.h>

#include <cmath>

#include "nlspin/hilbert.hpp"
#include "support.hpp"

using namespace nlspin;

namespace {

CMatrix diag4(double a, double b, double c, double d) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("state vectors are normalized on construction") {
  const StateVector s(vec2(3.0, Complex(0.0, 4.0)));
  CHECK(s.amplitudes().squaredNorm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(s[0] - 0.6) < 1e-15);
  CHECK_THROWS_AS(StateVector(CVector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(CVector::Ones(3)), std::invalid_argument);
  CVector bad = CVector::Ones(2);
  bad[1] = NAN;
  CHECK_THROWS_AS(StateVector{bad}, std::invalid_argument);
}

TEST_CASE("Hermitian operators reject non-Hermitian input") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator{m}, std::invalid_argument);
  m(1, 0) = 1.0;
  CHECK_NOTHROW(HermitianOperator{m});
}

TEST_CASE("expectation") {
  const StateVector up = StateVector::basis(2, 0);
  CHECK(expectation(sigma_z(), up) == 1.0);
  CHECK(expectation(sigma_x(), up) == 0.0);
  CHECK_THROWS_AS(expectation(sigma_z(), StateVector::basis(4, 0)), std::invalid_argument);

  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix o = testing::random_hermitian_matrix(4);
    const StateVector psi = testing::random_state(4);
    Complex sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) sum += std::conj(psi[i]) * o(i, j) * psi[j];
    }
    CHECK(std::abs(expectation(HermitianOperator(o), psi) - sum.real()) < 1e-12);
    CHECK(std::abs(sum.imag()) < 1e-12);
  }
}

TEST_CASE("Kronecker products follow the standard convention") {
  CHECK(kron(sigma_0(), sigma_z()).matrix().isApprox(diag4(1, -1, 1, -1)));
  CHECK(kron(sigma_z(), sigma_0()).matrix().isApprox(diag4(1, 1, -1, -1)));
  CHECK(embed(sigma_z(), Spin::kOne).matrix().isApprox(diag4(1, 1, -1, -1)));
  CHECK(embed(sigma_z(), Spin::kTwo).matrix().isApprox(diag4(1, -1, 1, -1)));

  // Embedded operators on different spins commute.
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix a = embed(testing::random_hermitian(2), Spin::kOne).matrix();
    const CMatrix b = embed(testing::random_hermitian(2), Spin::kTwo).matrix();
    CHECK((a * b - b * a).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spin-1 projection matrix entries") {
  // S1 . u1 written out by hand for u1 = (sin t cos p, sin t sin p, cos t).
  const double t = 0.7, p = -1.3;
  const Vec3 u(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
  const Complex e_minus = std::polar(std::sin(t), -p);
  const Complex e_plus = std::polar(std::sin(t), p);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = std::cos(t);
  expected(2, 2) = expected(3, 3) = -std::cos(t);
  expected(0, 2) = expected(1, 3) = e_minus;
  expected(2, 0) = expected(3, 1) = e_plus;
  CHECK((embed(pauli_dot(u), Spin::kOne).matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("projector") {
  CHECK(projector(vec2(1.0, 0.0)).matrix().isApprox(CMatrix(vec2(1, 0) * vec2(1, 0).adjoint())));
  CHECK(projector(vec2(2.0, 0.0)).matrix().isApprox(projector(vec2(1.0, 0.0)).matrix()));
  CHECK_THROWS_AS(projector(CVector::Zero(2)), std::invalid_argument);
  for (int trial = 0; trial < 100; ++trial) {
    const CVector v = testing::random_vector(trial % 2 ? 2 : 4) * (0.1 + trial);
    const CMatrix p = projector(v).matrix();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(p.trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("density operator of a pure state") {
  const DensityOperator rho(testing::random_state(4));
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("partial transpose determinant") {
  const DensityOperator product(StateVector::basis(4, 0));
  CHECK(std::abs(determinant(partial_transpose(product, Spin::kOne))) < 1e-15);

  CVector singlet(4);
  singlet << 0.0, 1.0, -1.0, 0.0;
  const DensityOperator bell{StateVector(singlet)};
  CHECK(std::abs(determinant(partial_transpose(bell, Spin::kOne)) - (-1.0 / 16.0)) < 1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const StateVector psi = testing::random_state(4);
    const double e = std::abs(psi[0] * psi[3] - psi[1] * psi[2]);
    const DensityOperator rho(psi);
    const Complex d1 = determinant(partial_transpose(rho, Spin::kOne));
    const Complex d2 = determinant(partial_transpose(rho, Spin::kTwo));
    CHECK(std::abs(d1 + std::pow(e, 4)) < 1e-12);
    CHECK(std::abs(d2 + std::pow(e, 4)) < 1e-12);
  }
  CHECK_THROWS_AS(partial_transpose(bell, static_cast<Spin>(3)), std::invalid_argument);
}

TEST_CASE("partial transpose swaps only the chosen spin's indices") {
  // Element-wise definition: (rho^T1)_{(i1 i2),(j1 j2)} = rho_{(j1 i2),(i1 j2)}.
  const DensityOperator rho(testing::random_state(4));
  const CMatrix t1 = partial_transpose(rho, Spin::kOne);
  const CMatrix t2 = partial_transpose(rho, Spin::kTwo);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) {
          CHECK(t1(2 * i1 + i2, 2 * j1 + j2) == rho.matrix()(2 * j1 + i2, 2 * i1 + j2));
          CHECK(t2(2 * i1 + i2, 2 * j1 + j2) == rho.matrix()(2 * i1 + j2, 2 * j1 + i2));
        }
}
