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

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "lfi/spectral.hpp"

namespace lfi {

enum class InterpMethod { kGaussian, kWeightedAverage };

[[nodiscard]] std::string_view to_string(InterpMethod method);
[[nodiscard]] InterpMethod parse_interp_method(std::string_view text);

inline constexpr std::size_t kDefaultInterpWindow = 25;

struct PeakEstimate {
  std::size_t ramp_index = 0;
  double beat_frequency_hz = 0.0;  // magnitude; the sign is resolved by the solver
  double intensity = 0.0;
  InterpMethod method = InterpMethod::kWeightedAverage;
  bool valid = false;
  std::size_t center_bin = 0;
};

/// A peak counts as a measurement when its intensity exceeds
///   max(abs_floor, kappa_median * median(nonzero bins), kappa_sigma * floor_sigma)
/// where floor_sigma is the calibrated per-bin noise at the peak, scaled to the
/// number of averaged frames.
struct ValidityRule {
  double abs_floor = 1e-9;
  double kappa_median = 3.0;
  double kappa_sigma = 6.0;
};

struct PeakConfig {
  std::size_t window = kDefaultInterpWindow;
  InterpMethod method = InterpMethod::kWeightedAverage;
  ValidityRule validity;
};

/// Global maximum with ties resolved toward the lower bin; nullopt when the
/// spectrum is empty or identically zero.
[[nodiscard]] std::optional<std::size_t> find_max_bin(const RampSpectrum& spectrum);

/// Intensity-weighted mean frequency over the window centred on `center_bin`
/// (clipped at the spectrum edges). nullopt when the window carries no weight.
[[nodiscard]] std::optional<PeakEstimate> weighted_average_interpolate(const RampSpectrum& spectrum,
                                                                       std::size_t center_bin,
                                                                       std::size_t window = kDefaultInterpWindow);

/// Levenberg-Marquardt fit of a*exp(-(f-b)^2 / (2 c^2)) to the window; the beat
/// frequency is b and the intensity a. Falls back to the weighted average (and
/// reports that method) when the fit diverges or b leaves the window.
[[nodiscard]] std::optional<PeakEstimate> gaussian_interpolate(const RampSpectrum& spectrum, std::size_t center_bin,
                                                               std::size_t window = kDefaultInterpWindow);

/// Median of the strictly positive bins, 0 when there are none.
[[nodiscard]] double median_nonzero(const RampSpectrum& spectrum);

/// Validity threshold for `spectrum` under `rule`.
[[nodiscard]] double validity_threshold(const RampSpectrum& spectrum, double floor_sigma, const ValidityRule& rule);

/// Max-bin selection, interpolation and validity classification in one step.
/// `floor_sigma` optionally holds the per-bin noise sigma of `spectrum` (empty
/// means no calibrated noise term). Always returns an estimate; it is marked
/// invalid when no peak exists or the peak fails the validity rule.
[[nodiscard]] PeakEstimate estimate_peak(const RampSpectrum& spectrum, const PeakConfig& config,
                                         std::span<const double> floor_sigma = {});

}  // namespace lfi
