#pragma once

// Stationary Gaussian noise with autocorrelation
//   <w_i(t) w_j(t')> = delta_ij omega_s^2 exp(-|t - t'| / tau_s),
// synthesized spectrally: each Fourier coefficient on a periodic grid is an
// independent complex Gaussian whose variance follows the Lorentzian power
// spectrum S(W) = 2 omega_s^2 tau_s / (1 + W^2 tau_s^2).

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "nlspin/hilbert.hpp"

namespace nlspin {

struct NoiseParams {
  double omega_s_sq = 1.0;
  double tau_s = 1.0;
  double t_total = 100.0;
  std::size_t n_grid = 4096;
  std::uint64_t seed = 0;
  int n_components = 3;

  /// Throws std::invalid_argument on an invalid grid: n_grid must be a power
  /// of two >= 256, the spacing at most tau_s / 20, and t_total >= 100 tau_s.
  void validate() const;
  double grid_spacing() const { return t_total / static_cast<double>(n_grid); }
};

/// Smallest admissible power-of-two grid for a window of `t_total`.
std::size_t default_grid_size(double tau_s, double t_total);

/// Sampled noise components on a periodic uniform grid, evaluated by linear
/// interpolation.
class NoiseRealization {
 public:
  NoiseRealization(double t_total, std::vector<std::vector<double>> components);

  int n_components() const { return static_cast<int>(components_.size()); }
  std::size_t n_grid() const { return n_grid_; }
  double t_total() const { return t_total_; }
  double grid_spacing() const { return spacing_; }
  std::span<const double> samples(int component) const;

  /// Linear interpolation; throws std::out_of_range outside [0, t_total].
  double value(int component, double t) const;

 private:
  double t_total_;
  std::size_t n_grid_;
  double spacing_;
  std::vector<std::vector<double>> components_;
};

/// Deterministic for a fixed seed. Component c draws from its own RNG stream,
/// so changing n_components leaves the existing components untouched.
NoiseRealization synthesize(const NoiseParams& params);

/// Unbiased sample autocovariance at the grid lag nearest to `lag`.
/// Throws std::invalid_argument unless 0 <= lag <= t_total / 4.
double autocovariance(const NoiseRealization& r, int component, double lag);

/// Sample cross-covariance of two components at the grid lag nearest to `lag`.
double cross_covariance(const NoiseRealization& r, int first, int second, double lag);

/// Which spins the fluctuating field acts on. Spin n uses components
/// 3(n-1) .. 3(n-1)+2 as its x, y, z fields.
struct NoiseCoupling {
  bool spin1 = true;
  bool spin2 = true;
};

/// base + sum over coupled spins of w_x(t) sigma_x + w_y(t) sigma_y + w_z(t) sigma_z.
HermitianOperator noisy_hamiltonian(const HermitianOperator& base, const NoiseRealization& r,
                                    double t, const NoiseCoupling& coupling = {});

/// CSV dump: header "t,w0,w1,..." then one row per grid point.
void write_noise_csv(const NoiseRealization& r, std::ostream& out);

}  // namespace nlspin
