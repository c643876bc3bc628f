#pragma once

#include <span>
#include <string>

namespace nlspin {

struct LimitCycleOptions {
  /// Minimum peak-to-peak amplitude for a detection.
  double amplitude_floor = 0.05;
  /// Allowed relative disagreement of the two half-window amplitudes.
  double window_tolerance = 0.2;
  /// Minimum number of samples after the transient is discarded.
  std::size_t min_samples = 4096;
};

struct LimitCycleReport {
  bool detected = false;
  double period = 0.0;
  /// Mean peak-to-peak amplitude of the two half windows.
  double amplitude = 0.0;
  double transient_end = 0.0;
  double amplitude_first = 0.0;
  double amplitude_second = 0.0;
  std::size_t bin_first = 0;
  std::size_t bin_second = 0;
  std::string reason;
};

/// Sustained-oscillation test on a uniformly sampled series. The leading
/// `transient_fraction` of the samples is dropped and the remainder split into
/// two halves; a cycle is reported when both halves have comparable
/// peak-to-peak amplitude above the floor and the same dominant frequency
/// (within one bin).
LimitCycleReport detect_limit_cycle(std::span<const double> times, std::span<const double> values,
                                    double transient_fraction, const LimitCycleOptions& options = {});

}  // namespace nlspin
