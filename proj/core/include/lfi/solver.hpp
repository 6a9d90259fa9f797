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
#include <optional>
#include <string_view>
#include <vector>

#include "lfi/modulation.hpp"
#include "lfi/peaks.hpp"

namespace lfi {

struct PairSolution {
  double distance_m = 0.0;
  double velocity_mps = 0.0;
};

struct NoiseSigmas {
  double sigma_distance_m = 0.0;
  double sigma_velocity_mps = 0.0;
};

enum class MeasurementStatus { kOk, kDegraded, kInvalid };

[[nodiscard]] std::string_view to_string(MeasurementStatus status);

struct Measurement {
  double distance_m = 0.0;
  double velocity_mps = 0.0;
  double sigma_distance_m = 0.0;
  double sigma_velocity_mps = 0.0;
  std::vector<std::size_t> selected_ramps;  // ascending ramp indices
  std::vector<int> sign_combo;              // +1/-1, aligned with selected_ramps
  double cluster_spread = 0.0;
  MeasurementStatus status = MeasurementStatus::kInvalid;
};

/// Reference scales that make distance and velocity scatter comparable in the
/// cluster score.
struct SolverConfig {
  double distance_scale_m = 0.05;
  double velocity_scale_mps = 0.1;
};

/// Distance and velocity from two signed beats on ramps of distinct slope:
///   R = c (f1 - f2) / (2 (S1 - S2)),  v = c (f2 S1 - f1 S2) / (f_e (S1 - S2)).
/// Throws DegeneratePairError when S1 == S2 or f_e == 0.
[[nodiscard]] PairSolution pair_solution(double f1_hz, double slope1, double f2_hz, double slope2,
                                         double emitted_frequency_hz);

/// Uncertainty of a pair solution for independent beat noise on both ramps.
[[nodiscard]] NoiseSigmas propagate_noise(double sigma_f1_hz, double sigma_f2_hz, double slope1, double slope2,
                                          double emitted_frequency_hz);

/// One sign hypothesis for the selected ramps.
struct SignCandidate {
  std::array<int, 3> signs{};
  std::array<PairSolution, 3> pairs{};  // (0,1), (0,2), (1,2) of the selected ramps
  PairSolution mean;
  double spread = 0.0;
};

/// sqrt(var(R) / R_ref^2 + var(v) / v_ref^2) over the three pair solutions
/// (population variance).
[[nodiscard]] double cluster_spread(const std::array<PairSolution, 3>& pairs, const SolverConfig& config);

/// Evaluates all eight sign assignments for three beat magnitudes.
/// Candidate i assigns sign -1 to selected ramp j when bit (2 - j) of i is set.
[[nodiscard]] std::array<SignCandidate, 8> enumerate_sign_combos(const std::array<double, 3>& magnitudes_hz,
                                                                 const std::array<double, 3>& slopes,
                                                                 double emitted_frequency_hz,
                                                                 const SolverConfig& config);

/// Resolves distance and velocity from the four ramp peaks: keeps the three
/// most intense valid peaks, picks the sign assignment whose pair solutions
/// cluster best, and of that assignment and its mirror keeps the one with a
/// positive mean distance. `sigma_fb_hz` optionally carries per-ramp beat noise
/// for uncertainty propagation over the steepest selected pair.
[[nodiscard]] Measurement disambiguate(const std::array<PeakEstimate, 4>& peaks, const WorkingPoint& wp,
                                       const SolverConfig& config = {},
                                       const std::optional<std::array<double, 4>>& sigma_fb_hz = std::nullopt);

/// Distance/velocity frequencies of the symmetric-triangle shortcut:
///   f_R = (f_up + f_down) / 2,  f_v = (f_up - f_down) / 2.
struct SimplifiedFrequencies {
  double distance_hz = 0.0;
  double velocity_hz = 0.0;
};

[[nodiscard]] SimplifiedFrequencies simplified_solution(double f_up_hz, double f_down_hz, const WorkingPoint& wp);

/// Converts shortcut frequencies to (R, v) using the steep slope:
/// R = c f_R / (2 S), v = c f_v / f_e.
[[nodiscard]] PairSolution simplified_to_measurement(const SimplifiedFrequencies& freqs, const WorkingPoint& wp);

}  // namespace lfi
