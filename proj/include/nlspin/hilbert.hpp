#pragma once

// Dense complex linear algebra for one and two spin-1/2 systems.
//
// Two-spin states use the fixed ordered basis |++>, |+->, |-+>, |-->, where
// the first label belongs to spin 1. With the standard Kronecker product,
// kron(K, I) therefore acts on spin 1 and kron(I, K) on spin 2.

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace nlspin {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 4;

using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec3 = Eigen::Vector3d;

namespace tol {
inline constexpr double kAlgebraic = 1e-12;
inline constexpr double kDynamical = 1e-8;
}  // namespace tol

/// Raised when a quantity that must be real or finite is not.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalized amplitude vector of dimension 2 or 4.
class StateVector {
 public:
  /// Normalizes `amplitudes`. Throws std::invalid_argument for a zero,
  /// non-finite, or wrongly sized input.
  explicit StateVector(const CVector& amplitudes);

  static StateVector basis(int dim, int index);

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](int i) const { return amps_[i]; }

 private:
  CVector amps_;
};

/// Square complex matrix with H = H^dagger.
class HermitianOperator {
 public:
  /// Throws std::invalid_argument if `m` is not square, not of dimension 2
  /// or 4, or not Hermitian within tol::kAlgebraic (relative to its largest
  /// entry when that exceeds one).
  explicit HermitianOperator(const CMatrix& m);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  CMatrix m_;
};

/// Pure-state density operator |psi><psi|.
class DensityOperator {
 public:
  explicit DensityOperator(const StateVector& psi);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  CMatrix m_;
};

enum class Spin { kOne = 1, kTwo = 2 };

HermitianOperator sigma_0();
HermitianOperator sigma_x();
HermitianOperator sigma_y();
HermitianOperator sigma_z();

/// n . sigma for a real 3-vector n.
HermitianOperator pauli_dot(const Vec3& n);

/// <psi|O|psi>. Throws std::invalid_argument on dimension mismatch and
/// NumericalError if the imaginary residue exceeds tolerance.
double expectation(const HermitianOperator& op, const StateVector& psi);

/// Standard Kronecker product of two 2x2 operators.
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

/// Embeds a single-spin operator into the two-spin space.
HermitianOperator embed(const HermitianOperator& k, Spin spin);

/// |v><v| / <v|v>. Throws std::invalid_argument for a zero vector.
HermitianOperator projector(const CVector& v);

/// Partial transpose of a 4x4 density operator over the indices of `spin`.
CMatrix partial_transpose(const DensityOperator& rho, Spin spin);

Complex determinant(const CMatrix& m);

}  // namespace nlspin
