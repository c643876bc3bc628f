#include "nlspin/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlspin {

namespace {

bool valid_dim(Eigen::Index n) { return n == 2 || n == 4; }

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

StateVector::StateVector(const CVector& amplitudes) : amps_(amplitudes) {
  if (!valid_dim(amps_.size())) {
    throw std::invalid_argument("StateVector: dimension must be 2 or 4, got " +
                                std::to_string(amps_.size()));
  }
  if (!amps_.allFinite()) throw std::invalid_argument("StateVector: non-finite amplitude");
  const double norm = amps_.norm();
  if (norm == 0.0) throw std::invalid_argument("StateVector: zero vector");
  amps_ /= norm;
}

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("StateVector::basis: index out of range");
  CVector v = CVector::Zero(dim);
  v[index] = 1.0;
  return StateVector(v);
}

HermitianOperator::HermitianOperator(const CMatrix& m) : m_(m) {
  if (m_.rows() != m_.cols() || !valid_dim(m_.rows())) {
    throw std::invalid_argument("HermitianOperator: expected a 2x2 or 4x4 matrix");
  }
  if (!m_.allFinite()) throw std::invalid_argument("HermitianOperator: non-finite entry");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol::kAlgebraic * scale) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian (max |H - H^dagger| = " +
                                std::to_string(asym) + ")");
  }
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  require_same_dim(dim(), other.dim(), "HermitianOperator::operator+");
  return HermitianOperator(m_ + other.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  require_same_dim(dim(), other.dim(), "HermitianOperator::operator-");
  return HermitianOperator(m_ - other.m_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(m_ * scale);
}

DensityOperator::DensityOperator(const StateVector& psi)
    : m_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

HermitianOperator sigma_0() { return HermitianOperator::identity(2); }

HermitianOperator sigma_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return HermitianOperator(m);
}

HermitianOperator sigma_y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return HermitianOperator(m);
}

HermitianOperator sigma_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return HermitianOperator(m);
}

HermitianOperator pauli_dot(const Vec3& n) {
  CMatrix m(2, 2);
  m << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
  return HermitianOperator(m);
}

double expectation(const HermitianOperator& op, const StateVector& psi) {
  require_same_dim(op.dim(), psi.dim(), "expectation");
  const Complex value = psi.amplitudes().dot(op.matrix() * psi.amplitudes());
  const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  if (std::abs(value.imag()) > tol::kAlgebraic * scale) {
    throw NumericalError("expectation: imaginary residue " + std::to_string(value.imag()) +
                         " above tolerance");
  }
  return value.real();
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != 2 || b.dim() != 2) throw std::invalid_argument("kron: both operands must be 2x2");
  CMatrix out(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block(2 * i, 2 * j, 2, 2) = a.matrix()(i, j) * b.matrix();
    }
  }
  return HermitianOperator(out);
}

HermitianOperator embed(const HermitianOperator& k, Spin spin) {
  switch (spin) {
    case Spin::kOne:
      return kron(k, sigma_0());
    case Spin::kTwo:
      return kron(sigma_0(), k);
  }
  throw std::invalid_argument("embed: spin must be 1 or 2");
}

HermitianOperator projector(const CVector& v) {
  if (!valid_dim(v.size())) throw std::invalid_argument("projector: dimension must be 2 or 4");
  const double norm_sq = v.squaredNorm();
  if (norm_sq == 0.0) throw std::invalid_argument("projector: zero vector");
  CMatrix p = v * v.adjoint() / norm_sq;
  // Rounding can leave an antisymmetric residue of a few ulps.
  p = 0.5 * (p + p.adjoint()).eval();
  return HermitianOperator(p);
}

CMatrix partial_transpose(const DensityOperator& rho, Spin spin) {
  if (rho.dim() != 4) throw std::invalid_argument("partial_transpose: expected a 4x4 density operator");
  if (spin != Spin::kOne && spin != Spin::kTwo) {
    throw std::invalid_argument("partial_transpose: subsystem must be 1 or 2");
  }
  const CMatrix& m = rho.matrix();
  CMatrix out(4, 4);
  for (int i1 = 0; i1 < 2; ++i1) {
    for (int i2 = 0; i2 < 2; ++i2) {
      for (int j1 = 0; j1 < 2; ++j1) {
        for (int j2 = 0; j2 < 2; ++j2) {
          const int row = 2 * i1 + i2;
          const int col = 2 * j1 + j2;
          if (spin == Spin::kOne) {
            out(row, col) = m(2 * j1 + i2, 2 * i1 + j2);
          } else {
            out(row, col) = m(2 * i1 + j2, 2 * j1 + i2);
          }
        }
      }
    }
  }
  return out;
}

Complex determinant(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix must be square");
  return m.determinant();
}

}  // namespace nlspin
