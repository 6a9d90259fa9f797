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

#include "lfi/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "lfi/errors.hpp"

namespace lfi {

std::vector<double> RampSpectrum::bin_frequencies() const {
  std::vector<double> f(magnitudes.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = frequency(k);
  return f;
}

void CalibrationSet::check_compatible(const WorkingPoint& wp, std::size_t fft_bins) const {
  if (n_bins != fft_bins) {
    throw CalibrationError("calibration was captured with " + std::to_string(n_bins) + " FFT bins, pipeline uses " +
                           std::to_string(fft_bins));
  }
  if (sampling_rate_hz != wp.sampling_rate_hz) throw CalibrationError("calibration sampling rate mismatch");
  if (samples_per_ramp != wp.samples_per_ramp()) throw CalibrationError("calibration ramp length mismatch");
  for (const auto& r : ramps) {
    if (r.reference_mean.size() != n_bins / 2 || r.reference_sigma.size() != n_bins / 2) {
      throw CalibrationError("calibration profile has the wrong number of bins");
    }
  }
}

CalibrationSet CalibrationSet::zero(const WorkingPoint& wp, std::size_t fft_bins) {
  CalibrationSet set;
  set.n_bins = fft_bins;
  set.sampling_rate_hz = wp.sampling_rate_hz;
  set.samples_per_ramp = wp.samples_per_ramp();
  for (auto& r : set.ramps) {
    r.reference_mean.assign(fft_bins / 2, 0.0);
    r.reference_sigma.assign(fft_bins / 2, 0.0);
    r.n_frames_used = 1;
  }
  return set;
}

CycleFrames slice_cycle(std::span<const double> samples, const WorkingPoint& wp) {
  const std::size_t per_ramp = wp.samples_per_ramp();
  if (samples.size() != 4 * per_ramp) {
    throw FramingError("cycle has " + std::to_string(samples.size()) + " samples, expected " +
                       std::to_string(4 * per_ramp));
  }
  CycleFrames frames;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto part = samples.subspan(i * per_ramp, per_ramp);
    frames[i].assign(part.begin(), part.end());
  }
  return frames;
}

std::vector<double> hamming_window(std::size_t n) {
  if (n == 1) return {1.0};
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

RampSpectrum frame_spectrum(std::span<const double> frame, const WorkingPoint& wp, std::size_t fft_bins,
                            std::size_t ramp_index) {
  if (frame.empty()) throw FramingError("frame_spectrum: empty frame");
  if (!std::has_single_bit(fft_bins) || fft_bins < 2) {
    throw ParameterError("frame_spectrum: fft_bins must be a power of two");
  }
  if (fft_bins < frame.size()) {
    throw ParameterError("frame_spectrum: fft_bins (" + std::to_string(fft_bins) + ") smaller than frame length (" +
                         std::to_string(frame.size()) + ")");
  }
  thread_local std::vector<double> window;
  if (window.size() != frame.size()) window = hamming_window(frame.size());
  std::vector<double> windowed(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) windowed[i] = frame[i] * window[i];

  const auto bins = detail::real_fft(windowed, fft_bins);
  RampSpectrum spec;
  spec.ramp_index = ramp_index;
  spec.n_bins = fft_bins;
  spec.bin_width_hz = wp.sampling_rate_hz / static_cast<double>(fft_bins);
  spec.magnitudes.resize(fft_bins / 2);
  for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) spec.magnitudes[k] = std::sqrt(std::norm(bins[k]));
  return spec;
}

namespace {

bool same_shape(const RampSpectrum& a, const RampSpectrum& b) {
  return a.n_bins == b.n_bins && a.magnitudes.size() == b.magnitudes.size() && a.bin_width_hz == b.bin_width_hz;
}

}  // namespace

RampSpectrum sliding_average(std::span<const RampSpectrum> history) {
  if (history.empty()) throw FramingError("sliding_average: empty history");
  RampSpectrum out = history.front();
  for (const auto& s : history.subspan(1)) {
    if (!same_shape(s, out)) throw FramingError("sliding_average: spectra differ in shape");
    for (std::size_t k = 0; k < out.magnitudes.size(); ++k) out.magnitudes[k] += s.magnitudes[k];
  }
  const double scale = 1.0 / static_cast<double>(history.size());
  for (double& m : out.magnitudes) m *= scale;
  out.ramp_index = history.back().ramp_index;
  return out;
}

SpectrumHistory::SpectrumHistory(std::size_t depth) : depth_(depth) {
  if (depth == 0) throw ParameterError("SpectrumHistory: depth must be >= 1");
}

void SpectrumHistory::push(RampSpectrum spectrum) {
  if (!entries_.empty() && !same_shape(entries_.front(), spectrum)) {
    throw FramingError("SpectrumHistory: spectrum shape changed");
  }
  entries_.push_back(std::move(spectrum));
  while (entries_.size() > depth_) entries_.pop_front();
}

RampSpectrum SpectrumHistory::average() const {
  if (entries_.empty()) throw FramingError("SpectrumHistory: no spectra");
  std::vector<RampSpectrum> window(entries_.begin(), entries_.end());
  return sliding_average(window);
}

CalibrationProfile calibrate(std::span<const RampSpectrum> spectra) {
  if (spectra.empty()) throw CalibrationError("calibrate: no frames");
  const std::size_t bins = spectra.front().magnitudes.size();
  CalibrationProfile profile;
  profile.reference_mean.assign(bins, 0.0);
  profile.reference_sigma.assign(bins, 0.0);
  profile.n_frames_used = spectra.size();
  for (const auto& s : spectra) {
    if (!same_shape(s, spectra.front())) throw CalibrationError("calibrate: spectra differ in shape");
    for (std::size_t k = 0; k < bins; ++k) profile.reference_mean[k] += s.magnitudes[k];
  }
  const double n = static_cast<double>(spectra.size());
  for (double& m : profile.reference_mean) m /= n;
  if (spectra.size() > 1) {
    for (const auto& s : spectra) {
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = s.magnitudes[k] - profile.reference_mean[k];
        profile.reference_sigma[k] += d * d;
      }
    }
    for (double& v : profile.reference_sigma) v = std::sqrt(v / (n - 1.0));
  }
  return profile;
}

CalibrationSet calibrate_cycles(std::span<const CycleFrames> cycles, const WorkingPoint& wp, std::size_t fft_bins) {
  if (cycles.size() < kMinCalibrationCycles) {
    throw CalibrationError("calibration needs at least " + std::to_string(kMinCalibrationCycles) +
                           " no-target cycles, got " + std::to_string(cycles.size()));
  }
  CalibrationSet set;
  set.n_bins = fft_bins;
  set.sampling_rate_hz = wp.sampling_rate_hz;
  set.samples_per_ramp = wp.samples_per_ramp();
  for (std::size_t r = 0; r < 4; ++r) {
    std::vector<RampSpectrum> spectra;
    spectra.reserve(cycles.size());
    for (const auto& c : cycles) spectra.push_back(frame_spectrum(c[r], wp, fft_bins, r));
    set.ramps[r] = calibrate(spectra);
  }
  return set;
}

RampSpectrum subtract_floor(const RampSpectrum& spectrum, const CalibrationProfile& cal, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ParameterError("subtract_floor: alpha and beta must be >= 0");
  if (cal.reference_mean.size() != spectrum.magnitudes.size() ||
      cal.reference_sigma.size() != spectrum.magnitudes.size()) {
    throw FramingError("subtract_floor: calibration does not match spectrum size");
  }
  RampSpectrum out = spectrum;
  for (std::size_t k = 0; k < out.magnitudes.size(); ++k) {
    out.magnitudes[k] =
        std::max(spectrum.magnitudes[k] - alpha * cal.reference_mean[k] - beta * cal.reference_sigma[k], 0.0);
  }
  return out;
}

}  // namespace lfi
