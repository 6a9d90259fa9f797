// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The lfisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "lfi/modulation.hpp"

namespace lfi {

inline constexpr std::size_t kDefaultFftBins = 2048;

/// One-sided magnitude spectrum of a single ramp.
struct RampSpectrum {
  std::size_t ramp_index = 0;
  std::size_t n_bins = 0;              // FFT size after zero padding
  double bin_width_hz = 0.0;           // sampling_rate / n_bins
  std::vector<double> magnitudes;      // n_bins / 2 entries

  [[nodiscard]] std::size_t size() const { return magnitudes.size(); }
  [[nodiscard]] double frequency(std::size_t bin) const { return static_cast<double>(bin) * bin_width_hz; }
  [[nodiscard]] std::vector<double> bin_frequencies() const;
};

/// Per-bin statistics of no-target spectra for one ramp index.
struct CalibrationProfile {
  std::vector<double> reference_mean;   // D(k)
  std::vector<double> reference_sigma;  // Sigma(k)
  std::size_t n_frames_used = 0;
};

/// Calibration for all four ramps plus the acquisition metadata it is valid for.
struct CalibrationSet {
  std::size_t n_bins = 0;
  double sampling_rate_hz = 0.0;
  std::size_t samples_per_ramp = 0;
  std::array<CalibrationProfile, 4> ramps;

  /// Throws CalibrationError when the set was captured with a different
  /// acquisition geometry.
  void check_compatible(const WorkingPoint& wp, std::size_t fft_bins) const;

  /// A calibration that subtracts nothing (all-zero reference).
  static CalibrationSet zero(const WorkingPoint& wp, std::size_t fft_bins);
};

using CycleFrames = std::array<std::vector<double>, 4>;

inline constexpr std::size_t kMinCalibrationCycles = 16;

/// Splits one cycle of samples into its four ramps. Throws FramingError when
/// the buffer is not exactly one cycle long.
[[nodiscard]] CycleFrames slice_cycle(std::span<const double> samples, const WorkingPoint& wp);

/// Symmetric Hamming window of length n.
[[nodiscard]] std::vector<double> hamming_window(std::size_t n);

/// Hamming-windowed, zero-padded FFT magnitude (one-sided, n_bins/2 bins).
/// `fft_bins` must be a power of two no smaller than the frame length.
[[nodiscard]] RampSpectrum frame_spectrum(std::span<const double> frame, const WorkingPoint& wp,
                                          std::size_t fft_bins = kDefaultFftBins, std::size_t ramp_index = 0);

/// Per-bin mean over the given spectra (all of the same shape).
[[nodiscard]] RampSpectrum sliding_average(std::span<const RampSpectrum> history);

/// Bounded history of the most recent spectra of one ramp index.
class SpectrumHistory {
 public:
  explicit SpectrumHistory(std::size_t depth = 1);

  void push(RampSpectrum spectrum);
  [[nodiscard]] RampSpectrum average() const;
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] bool full() const { return entries_.size() == depth_; }
  void clear() { entries_.clear(); }

 private:
  std::size_t depth_;
  std::deque<RampSpectrum> entries_;
};

/// Per-bin mean and standard deviation of single-frame spectra.
[[nodiscard]] CalibrationProfile calibrate(std::span<const RampSpectrum> spectra);

/// Builds the four per-ramp profiles from no-target cycles. Throws
/// CalibrationError with fewer than kMinCalibrationCycles cycles.
[[nodiscard]] CalibrationSet calibrate_cycles(std::span<const CycleFrames> cycles, const WorkingPoint& wp,
                                              std::size_t fft_bins = kDefaultFftBins);

/// max(X(k) - alpha*D(k) - beta*Sigma(k), 0) per bin.
[[nodiscard]] RampSpectrum subtract_floor(const RampSpectrum& spectrum, const CalibrationProfile& cal,
                                          double alpha = 1.0, double beta = 0.0);

}  // namespace lfi
