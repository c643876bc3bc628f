#include "nlspin/limit_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fft.hpp"

namespace nlspin {

namespace {

double peak_to_peak(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

// Index of the largest non-DC bin of the Hann-windowed, mean-removed series.
std::size_t dominant_bin(std::span<const double> x) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                             static_cast<double>(n - 1));
    w[i] = (x[i] - mean) * hann;
  }
  const auto spec = detail::real_fft(w);
  std::size_t best = 1;
  for (std::size_t k = 2; k < spec.size(); ++k) {
    if (std::norm(spec[k]) > std::norm(spec[best])) best = k;
  }
  return best;
}

}  // namespace

LimitCycleReport detect_limit_cycle(std::span<const double> times, std::span<const double> values,
                                    double transient_fraction, const LimitCycleOptions& options) {
  if (times.size() != values.size()) throw std::invalid_argument("detect_limit_cycle: size mismatch");
  if (!(transient_fraction >= 0.0) || !(transient_fraction < 1.0)) {
    throw std::invalid_argument("detect_limit_cycle: transient_fraction must lie in [0, 1)");
  }
  const auto skip = static_cast<std::size_t>(transient_fraction * static_cast<double>(values.size()));
  const std::size_t kept = values.size() - skip;
  if (kept < options.min_samples || kept < 16) {
    throw std::invalid_argument("detect_limit_cycle: need at least " +
                                std::to_string(options.min_samples) + " samples after the transient");
  }
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("detect_limit_cycle: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt) {
      throw std::invalid_argument("detect_limit_cycle: samples must be uniformly spaced");
    }
  }

  LimitCycleReport r;
  r.transient_end = times[skip];
  const std::size_t half = kept / 2;
  const auto first = values.subspan(skip, half);
  const auto second = values.subspan(skip + half, half);
  r.amplitude_first = peak_to_peak(first);
  r.amplitude_second = peak_to_peak(second);
  r.amplitude = 0.5 * (r.amplitude_first + r.amplitude_second);
  r.bin_first = dominant_bin(first);
  r.bin_second = dominant_bin(second);
  const double bin = 0.5 * static_cast<double>(r.bin_first + r.bin_second);
  r.period = static_cast<double>(half) * dt / bin;

  const double larger = std::max(r.amplitude_first, r.amplitude_second);
  const double mismatch = larger > 0.0 ? std::abs(r.amplitude_first - r.amplitude_second) / larger : 0.0;
  const auto bin_gap = r.bin_first > r.bin_second ? r.bin_first - r.bin_second : r.bin_second - r.bin_first;
  if (std::min(r.amplitude_first, r.amplitude_second) < options.amplitude_floor) {
    r.reason = "amplitude below floor";
  } else if (mismatch > options.window_tolerance) {
    r.reason = "half-window amplitudes disagree";
  } else if (bin_gap > 1) {
    r.reason = "dominant frequency not stable";
  } else {
    r.detected = true;
  }
  return r;
}

}  // namespace nlspin
