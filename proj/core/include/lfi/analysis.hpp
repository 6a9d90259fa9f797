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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lfi/modulation.hpp"
#include "lfi/simulator.hpp"

namespace lfi {

// ---------------------------------------------------------------------------
// Blind regions
// ---------------------------------------------------------------------------

/// Number of ramps whose |signed beat| lies below the high-pass cutoff.
[[nodiscard]] int blind_count(const WorkingPoint& wp, const GroundTruth& gt);

struct AxisRange {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

[[nodiscard]] std::vector<double> make_axis(const AxisRange& range);

struct BlindMap {
  std::vector<double> v_axis;  // m/s
  std::vector<double> r_axis;  // m
  std::vector<std::uint8_t> blind_count;  // row-major, index r * v_axis.size() + v

  [[nodiscard]] int at(std::size_t v_index, std::size_t r_index) const {
    return blind_count[r_index * v_axis.size() + v_index];
  }
};

/// Evaluates blind_count on a (v, R) grid. Throws ParameterError for empty or
/// non-increasing ranges.
[[nodiscard]] BlindMap blind_map(const WorkingPoint& wp, const AxisRange& v_range, const AxisRange& r_range);

/// CSV with header `v_mps,R_m,blind_count`, one row per cell.
void write_blind_map_csv(std::ostream& out, const BlindMap& map);
/// Dense matrix: first line velocities, then one line per distance starting
/// with the distance followed by the counts.
void write_blind_map_grid(std::ostream& out, const BlindMap& map);

/// True when some |v| <= v_max puts two or more ramps into their blind
/// regions at distance R. Evaluated exactly from the blind intervals.
[[nodiscard]] bool has_blind_overlap(const WorkingPoint& wp, double distance_m, double v_max_mps);

inline constexpr double kDefaultMinDistanceSearchMax = 0.10;  // m
inline constexpr double kMinDistanceTolerance = 1e-6;         // m

/// Smallest R such that at most one ramp is blind for every |v| <= v_max.
/// Coarse grid scan followed by bisection. nullopt when the overlap persists up
/// to `search_max_m`.
[[nodiscard]] std::optional<double> min_reliable_distance(const WorkingPoint& wp, double v_max_mps,
                                                          double search_max_m = kDefaultMinDistanceSearchMax);

// ---------------------------------------------------------------------------
// Beat-frequency noise model
//   log10(sqrt(n_avg) sigma_fb) = a1 log10(f_ramp) + a2 log10(S) + a3 log10(f_b)
//                                 + a4 log10(v) + a5 log10(R) + b
// ---------------------------------------------------------------------------

struct NoiseRegressors {
  double ramp_rate_hz = 0.0;   // f_ramp = 1 / ramp duration
  double slope_hz_per_s = 0.0;
  double beat_hz = 0.0;
  double velocity_mps = 0.0;
  double distance_m = 0.0;
  double n_avg = 1.0;
};

struct NoiseObservation {
  NoiseRegressors regressors;
  double observed_sigma_fb_hz = 0.0;
};

inline constexpr std::array<std::string_view, 5> kNoiseRegressorNames = {"f_ramp_rate", "slope_S", "beat_f_b",
                                                                         "velocity_v", "distance_R"};

struct NoiseModelCoefficients {
  std::array<double, 5> slopes{};  // a1..a5
  double intercept = 0.0;          // b
  double fit_residual = 0.0;       // RMS of the log10 residuals
  std::array<double, 6> standard_errors{};  // a1..a5, b; zero for exact fits
  std::size_t n_observations = 0;
};

inline constexpr std::size_t kMinNoiseObservations = 12;

/// Ordinary least squares in the log10 domain. Throws FitError for too few
/// observations, non-positive values or a rank-deficient design (the message
/// names the offending regressor).
[[nodiscard]] NoiseModelCoefficients fit_noise_model(std::span<const NoiseObservation> observations);

/// sigma_fb predicted by the model; throws FitError for non-positive regressors.
[[nodiscard]] double predict_sigma_fb(const NoiseModelCoefficients& coeffs, const NoiseRegressors& regressors);

/// CSV header: f_ramp_rate,slope_S,beat_f_b,velocity_v,distance_R,n_avg,observed_sigma_fb
[[nodiscard]] std::vector<NoiseObservation> read_noise_observations(std::istream& in);
void write_noise_observations(std::ostream& out, std::span<const NoiseObservation> observations);

void write_noise_model(std::ostream& out, const NoiseModelCoefficients& coeffs);
[[nodiscard]] NoiseModelCoefficients read_noise_model(std::istream& in);

}  // namespace lfi
