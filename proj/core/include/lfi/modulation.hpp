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
#include <iosfwd>
#include <string>
#include <vector>

#include "lfi/constants.hpp"

namespace lfi {

/// Operating parameters of the four-ramp modulation and the acquisition chain.
///
/// Every ramp of a cycle lasts `ramp_duration_s`; the associated ramp rate is
/// its reciprocal. Only the optical frequency slope matters for ranging, so the
/// modulation amplitude is folded into `steep_slope_hz_per_s`.
struct WorkingPoint {
  double ramp_duration_s = 250e-6;
  double steep_slope_hz_per_s = 5e14;
  double ratio_rt = 0.25;
  double emitted_frequency_hz = kEmitterFrequency;
  double hp_cutoff_hz = 10e3;
  double sampling_rate_hz = 4.096e6;

  [[nodiscard]] double ramp_rate_hz() const { return 1.0 / ramp_duration_s; }
  [[nodiscard]] double cycle_duration_s() const { return 4.0 * ramp_duration_s; }
  /// Measurements are produced once per modulation cycle.
  [[nodiscard]] double measurement_rate_hz() const { return 1.0 / cycle_duration_s(); }
  [[nodiscard]] std::size_t samples_per_ramp() const;
  [[nodiscard]] std::size_t samples_per_cycle() const { return 4 * samples_per_ramp(); }
  [[nodiscard]] double nyquist_hz() const { return 0.5 * sampling_rate_hz; }
  [[nodiscard]] double emitted_wavelength_m() const { return kSpeedOfLight / emitted_frequency_hz; }

  friend bool operator==(const WorkingPoint&, const WorkingPoint&) = default;
};

/// Throws ParameterError naming the first violated invariant.
void validate(const WorkingPoint& wp);

enum class RampKind { kSteepUp = 0, kSteepDown = 1, kShallowUp = 2, kShallowDown = 3 };

struct RampDescriptor {
  std::size_t index = 0;
  double slope_hz_per_s = 0.0;
  double start_time_s = 0.0;
  double duration_s = 0.0;

  friend bool operator==(const RampDescriptor&, const RampDescriptor&) = default;
};

using RampCycle = std::array<RampDescriptor, 4>;

/// Ramps ordered steep-up, steep-down, shallow-up, shallow-down with slopes
/// (+S, -S, +rt*S, -rt*S) and contiguous start times.
[[nodiscard]] RampCycle build_cycle(const WorkingPoint& wp);

/// Signed slopes of the four ramps in cycle order.
[[nodiscard]] std::array<double, 4> ramp_slopes(const WorkingPoint& wp);

/// Instantaneous optical frequency offset (Hz, relative to the shared
/// baseline) sampled at `n_samples` equidistant instants spanning the closed
/// cycle interval [0, 4T]. Requires at least four samples per ramp.
[[nodiscard]] std::vector<double> modulation_waveform(const WorkingPoint& wp, std::size_t n_samples);

/// Slope that produces a given peak frequency excursion of the steep triangle
/// within one ramp. Hardware that fixes the excursion couples slope and ramp rate.
[[nodiscard]] double slope_for_excursion(double peak_excursion_hz, double ramp_duration_s);

/// True when the steep triangle's excursion S*T does not exceed `max_excursion_hz`.
[[nodiscard]] bool excursion_within(const WorkingPoint& wp, double max_excursion_hz);

// Flat key-value persistence. Keys: ramp_duration_s, steep_slope_hz_per_s,
// ratio_rt, emitted_frequency_hz, hp_cutoff_hz, sampling_rate_hz.
void write_working_point(std::ostream& out, const WorkingPoint& wp);
[[nodiscard]] WorkingPoint read_working_point(std::istream& in);

}  // namespace lfi
