#pragma once

// Thin wrappers over FFTW's real transforms. FFTW planning is not
// thread-safe, so plan creation and destruction are serialized internally.

#include <complex>
#include <span>
#include <vector>

namespace nlspin::detail {

/// Unnormalized forward transform; returns the n/2 + 1 non-negative bins.
std::vector<std::complex<double>> real_fft(std::span<const double> x);

/// Unnormalized inverse of a Hermitian half spectrum of n/2 + 1 bins:
/// x_j = sum_k X_k exp(+2 pi i k j / n) over the implied full spectrum.
std::vector<double> inverse_real_fft(std::span<const std::complex<double>> half, std::size_t n);

}  // namespace nlspin::detail
