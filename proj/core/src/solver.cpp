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

#include "lfi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lfi/constants.hpp"
#include "lfi/errors.hpp"
#include "lfi/simulator.hpp"

namespace lfi {

std::string_view to_string(MeasurementStatus status) {
  switch (status) {
    case MeasurementStatus::kOk:
      return "ok";
    case MeasurementStatus::kDegraded:
      return "degraded";
    case MeasurementStatus::kInvalid:
      break;
  }
  return "invalid";
}

PairSolution pair_solution(double f1_hz, double slope1, double f2_hz, double slope2, double emitted_frequency_hz) {
  if (slope1 == slope2) throw DegeneratePairError("pair_solution: ramps have identical slope");
  if (emitted_frequency_hz == 0.0) throw DegeneratePairError("pair_solution: emitted frequency is zero");
  const double ds = slope1 - slope2;
  return {kSpeedOfLight * (f1_hz - f2_hz) / (2.0 * ds),
          kSpeedOfLight * (f2_hz * slope1 - f1_hz * slope2) / (emitted_frequency_hz * ds)};
}

NoiseSigmas propagate_noise(double sigma_f1_hz, double sigma_f2_hz, double slope1, double slope2,
                            double emitted_frequency_hz) {
  if (slope1 == slope2) throw DegeneratePairError("propagate_noise: ramps have identical slope");
  if (emitted_frequency_hz == 0.0) throw DegeneratePairError("propagate_noise: emitted frequency is zero");
  if (!(sigma_f1_hz >= 0.0) || !(sigma_f2_hz >= 0.0)) throw ParameterError("propagate_noise: sigmas must be >= 0");
  const double ds = std::abs(slope1 - slope2);
  const double wavelength = kSpeedOfLight / emitted_frequency_hz;
  return {kSpeedOfLight * std::hypot(sigma_f1_hz, sigma_f2_hz) / (2.0 * ds),
          wavelength * std::hypot(slope1 * sigma_f2_hz, slope2 * sigma_f1_hz) / ds};
}

double cluster_spread(const std::array<PairSolution, 3>& pairs, const SolverConfig& config) {
  double mean_r = 0.0, mean_v = 0.0;
  for (const auto& p : pairs) {
    mean_r += p.distance_m;
    mean_v += p.velocity_mps;
  }
  mean_r /= 3.0;
  mean_v /= 3.0;
  double var_r = 0.0, var_v = 0.0;
  for (const auto& p : pairs) {
    var_r += (p.distance_m - mean_r) * (p.distance_m - mean_r);
    var_v += (p.velocity_mps - mean_v) * (p.velocity_mps - mean_v);
  }
  var_r /= 3.0;
  var_v /= 3.0;
  return std::sqrt(var_r / (config.distance_scale_m * config.distance_scale_m) +
                   var_v / (config.velocity_scale_mps * config.velocity_scale_mps));
}

std::array<SignCandidate, 8> enumerate_sign_combos(const std::array<double, 3>& magnitudes_hz,
                                                   const std::array<double, 3>& slopes, double emitted_frequency_hz,
                                                   const SolverConfig& config) {
  constexpr std::array<std::pair<int, int>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};
  std::array<SignCandidate, 8> out{};
  for (int combo = 0; combo < 8; ++combo) {
    auto& cand = out[static_cast<std::size_t>(combo)];
    std::array<double, 3> f{};
    for (int j = 0; j < 3; ++j) {
      cand.signs[static_cast<std::size_t>(j)] = (combo >> (2 - j)) & 1 ? -1 : 1;
      f[static_cast<std::size_t>(j)] = cand.signs[static_cast<std::size_t>(j)] * magnitudes_hz[static_cast<std::size_t>(j)];
    }
    for (std::size_t p = 0; p < kPairs.size(); ++p) {
      const auto [a, b] = kPairs[p];
      cand.pairs[p] = pair_solution(f[static_cast<std::size_t>(a)], slopes[static_cast<std::size_t>(a)],
                                    f[static_cast<std::size_t>(b)], slopes[static_cast<std::size_t>(b)],
                                    emitted_frequency_hz);
    }
    for (const auto& p : cand.pairs) {
      cand.mean.distance_m += p.distance_m / 3.0;
      cand.mean.velocity_mps += p.velocity_mps / 3.0;
    }
    cand.spread = cluster_spread(cand.pairs, config);
  }
  return out;
}

namespace {

double min_implied_beat(const WorkingPoint& wp, const PairSolution& s) {
  const auto beats = signed_beats(wp, GroundTruth{s.distance_m, s.velocity_mps});
  double m = std::numeric_limits<double>::infinity();
  for (double f : beats) m = std::min(m, std::abs(f));
  return m;
}

bool spreads_tie(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace

Measurement disambiguate(const std::array<PeakEstimate, 4>& peaks, const WorkingPoint& wp,
                         const SolverConfig& config, const std::optional<std::array<double, 4>>& sigma_fb_hz) {
  Measurement m;
  m.sigma_distance_m = std::numeric_limits<double>::quiet_NaN();
  m.sigma_velocity_mps = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < 4; ++i) {
    if (peaks[i].valid) valid.push_back(i);
  }
  if (valid.size() < 3) return m;

  if (valid.size() == 4) {
    // Drop the weakest ramp; among equal intensities the higher index goes.
    std::stable_sort(valid.begin(), valid.end(),
                     [&](std::size_t a, std::size_t b) { return peaks[a].intensity > peaks[b].intensity; });
    valid.pop_back();
    std::sort(valid.begin(), valid.end());
  }

  const auto slopes_all = ramp_slopes(wp);
  std::array<double, 3> mags{}, slopes{};
  for (std::size_t j = 0; j < 3; ++j) {
    mags[j] = peaks[valid[j]].beat_frequency_hz;
    slopes[j] = slopes_all[valid[j]];
  }
  const auto candidates = enumerate_sign_combos(mags, slopes, wp.emitted_frequency_hz, config);

  // Candidates c and 7 - c are mirror images with identical spread; keep the
  // member with positive mean distance from each mirror pair.
  const SignCandidate* best = nullptr;
  double best_clearance = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& a = candidates[c];
    const auto& b = candidates[7 - c];
    const SignCandidate* pick = a.mean.distance_m >= b.mean.distance_m ? &a : &b;
    if (best == nullptr) {
      best = pick;
      best_clearance = min_implied_beat(wp, pick->mean);
    } else if (spreads_tie(pick->spread, best->spread)) {
      // Prefer the hypothesis that keeps every ramp farther from DC.
      const double clearance = min_implied_beat(wp, pick->mean);
      if (clearance > best_clearance) {
        best = pick;
        best_clearance = clearance;
      }
    } else if (pick->spread < best->spread) {
      best = pick;
      best_clearance = min_implied_beat(wp, pick->mean);
    }
  }

  m.selected_ramps = valid;
  m.sign_combo.assign(best->signs.begin(), best->signs.end());
  m.distance_m = best->mean.distance_m;
  m.velocity_mps = best->mean.velocity_mps;
  m.cluster_spread = best->spread;
  if (!(m.distance_m > 0.0)) {
    m.status = MeasurementStatus::kInvalid;
    return m;
  }
  m.status = peaks[0].valid && peaks[1].valid && peaks[2].valid && peaks[3].valid ? MeasurementStatus::kOk
                                                                                   : MeasurementStatus::kDegraded;

  if (sigma_fb_hz) {
    std::size_t ia = valid[0], ib = valid[1];
    double widest = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = a + 1; b < 3; ++b) {
        const double ds = std::abs(slopes_all[valid[a]] - slopes_all[valid[b]]);
        if (ds > widest) {
          widest = ds;
          ia = valid[a];
          ib = valid[b];
        }
      }
    }
    const double sa = (*sigma_fb_hz)[ia], sb = (*sigma_fb_hz)[ib];
    if (sa >= 0.0 && sb >= 0.0) {
      const auto s = propagate_noise(sa, sb, slopes_all[ia], slopes_all[ib], wp.emitted_frequency_hz);
      m.sigma_distance_m = s.sigma_distance_m;
      m.sigma_velocity_mps = s.sigma_velocity_mps;
    }
  }
  return m;
}

SimplifiedFrequencies simplified_solution(double f_up_hz, double f_down_hz, const WorkingPoint& /*wp*/) {
  return {0.5 * (f_up_hz + f_down_hz), 0.5 * (f_up_hz - f_down_hz)};
}

PairSolution simplified_to_measurement(const SimplifiedFrequencies& freqs, const WorkingPoint& wp) {
  return {kSpeedOfLight * freqs.distance_hz / (2.0 * wp.steep_slope_hz_per_s),
          kSpeedOfLight * freqs.velocity_hz / wp.emitted_frequency_hz};
}

}  // namespace lfi
