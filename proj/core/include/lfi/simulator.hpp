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

#include <cstdint>
#include <span>
#include <vector>

#include "lfi/modulation.hpp"

namespace lfi {

struct GroundTruth {
  double distance_m = 0.0;
  double velocity_mps = 0.0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// One synthesized ramp of ADC samples together with its bookkeeping.
struct SyntheticFrame {
  RampDescriptor ramp;
  std::vector<double> samples;
  double true_signed_beat_hz = 0.0;
  bool blind = false;  // |true_signed_beat_hz| < hp_cutoff; test bookkeeping only
};

/// Signed beat frequency of a ramp for a target at (R, v):
///   f = (2 R slope + f_e v) / c
/// This is the exact algebraic inverse of the two-ramp distance/velocity
/// equations, so pair solutions recover (R, v) to rounding.
[[nodiscard]] double signed_beat(const WorkingPoint& wp, const RampDescriptor& ramp, const GroundTruth& gt);
[[nodiscard]] double signed_beat(const WorkingPoint& wp, double slope_hz_per_s, const GroundTruth& gt);

/// Signed beats of all four ramps of a cycle.
[[nodiscard]] std::array<double, 4> signed_beats(const WorkingPoint& wp, const GroundTruth& gt);

/// Fourth-order Butterworth high-pass (two cascaded biquads, -3 dB at
/// wp.hp_cutoff_hz) standing in for the analog front-end filter. Starts from
/// rest. A zero cutoff is a pass-through.
[[nodiscard]] std::vector<double> highpass(std::span<const double> samples, const WorkingPoint& wp);

/// Magnitude response of `highpass` at `frequency_hz`, evaluated from the
/// digital transfer function.
[[nodiscard]] double highpass_gain(const WorkingPoint& wp, double frequency_hz);

/// Single-tone target model: amplitude*cos(2*pi*|f|*t + phi) plus white Gaussian
/// noise, passed through `highpass`. The filter is run over a pre-roll of the
/// same stationary signal so the returned frame carries no start-up transient.
/// Deterministic for a fixed seed. Throws AliasingError when |f| >= Nyquist and
/// ParameterError for amplitude < 0 or noise_sigma < 0.
[[nodiscard]] SyntheticFrame synthesize_frame(const WorkingPoint& wp, const RampDescriptor& ramp,
                                              const GroundTruth& gt, double amplitude, double noise_sigma,
                                              std::uint64_t seed);

/// Per-frame seed derived from a stream seed, cycle index and ramp index.
[[nodiscard]] std::uint64_t frame_seed(std::uint64_t stream_seed, std::uint64_t cycle, std::size_t ramp_index);

}  // namespace lfi
