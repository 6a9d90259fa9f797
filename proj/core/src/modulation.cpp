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

#include "lfi/modulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <istream>
#include <ostream>
#include <string_view>

#include "lfi/errors.hpp"
#include "lfi/keyvalue.hpp"

namespace lfi {

std::size_t WorkingPoint::samples_per_ramp() const {
  return static_cast<std::size_t>(std::llround(ramp_duration_s * sampling_rate_hz));
}

void validate(const WorkingPoint& wp) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("working point: ") + what);
  };
  require(std::isfinite(wp.ramp_duration_s) && wp.ramp_duration_s > 0.0, "ramp_duration_s must be > 0");
  require(std::isfinite(wp.steep_slope_hz_per_s) && wp.steep_slope_hz_per_s > 0.0,
          "steep_slope_hz_per_s must be > 0");
  require(wp.ratio_rt > 0.0 && wp.ratio_rt < 1.0, "ratio_rt must lie in (0, 1)");
  require(std::isfinite(wp.emitted_frequency_hz) && wp.emitted_frequency_hz > 0.0,
          "emitted_frequency_hz must be > 0");
  require(std::isfinite(wp.hp_cutoff_hz) && wp.hp_cutoff_hz >= 0.0, "hp_cutoff_hz must be >= 0");
  require(std::isfinite(wp.sampling_rate_hz) && wp.sampling_rate_hz > 0.0, "sampling_rate_hz must be > 0");
  require(wp.sampling_rate_hz > 2.0 * wp.hp_cutoff_hz, "sampling_rate_hz must exceed 2 * hp_cutoff_hz");
  require(wp.samples_per_ramp() >= 4, "a ramp must span at least 4 samples");
}

std::array<double, 4> ramp_slopes(const WorkingPoint& wp) {
  const double s = wp.steep_slope_hz_per_s;
  const double shallow = wp.ratio_rt * s;
  return {s, -s, shallow, -shallow};
}

RampCycle build_cycle(const WorkingPoint& wp) {
  validate(wp);
  const auto slopes = ramp_slopes(wp);
  RampCycle cycle;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    cycle[i] = RampDescriptor{i, slopes[i], static_cast<double>(i) * wp.ramp_duration_s, wp.ramp_duration_s};
  }
  return cycle;
}

std::vector<double> modulation_waveform(const WorkingPoint& wp, std::size_t n_samples) {
  validate(wp);
  if (n_samples < 16) throw ParameterError("modulation_waveform: need at least 4 samples per ramp");
  const auto cycle = build_cycle(wp);
  const double period = wp.cycle_duration_s();
  std::vector<double> out(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double t = period * static_cast<double>(j) / static_cast<double>(n_samples - 1);
    auto ramp = std::min<std::size_t>(static_cast<std::size_t>(t / wp.ramp_duration_s), 3);
    // Integrate the piecewise-constant slope up to t.
    double f = 0.0;
    for (std::size_t r = 0; r < ramp; ++r) f += cycle[r].slope_hz_per_s * cycle[r].duration_s;
    f += cycle[ramp].slope_hz_per_s * (t - cycle[ramp].start_time_s);
    out[j] = f;
  }
  // Rounding leaves ~1 ulp of the peak at the closing instant.
  out.back() = 0.0;
  return out;
}

double slope_for_excursion(double peak_excursion_hz, double ramp_duration_s) {
  if (!(ramp_duration_s > 0.0) || !(peak_excursion_hz > 0.0)) {
    throw ParameterError("slope_for_excursion: excursion and duration must be > 0");
  }
  return peak_excursion_hz / ramp_duration_s;
}

bool excursion_within(const WorkingPoint& wp, double max_excursion_hz) {
  return wp.steep_slope_hz_per_s * wp.ramp_duration_s <= max_excursion_hz;
}

namespace {
constexpr std::array<std::string_view, 6> kWorkingPointKeys = {
    "ramp_duration_s", "steep_slope_hz_per_s", "ratio_rt", "emitted_frequency_hz", "hp_cutoff_hz",
    "sampling_rate_hz"};
}

void write_working_point(std::ostream& out, const WorkingPoint& wp) {
  out << "ramp_duration_s = " << format_double(wp.ramp_duration_s) << '\n'
      << "steep_slope_hz_per_s = " << format_double(wp.steep_slope_hz_per_s) << '\n'
      << "ratio_rt = " << format_double(wp.ratio_rt) << '\n'
      << "emitted_frequency_hz = " << format_double(wp.emitted_frequency_hz) << '\n'
      << "hp_cutoff_hz = " << format_double(wp.hp_cutoff_hz) << '\n'
      << "sampling_rate_hz = " << format_double(wp.sampling_rate_hz) << '\n';
}

WorkingPoint read_working_point(std::istream& in) {
  const auto file = KeyValueFile::parse(in);
  file.reject_unknown(kWorkingPointKeys);
  WorkingPoint wp;
  wp.ramp_duration_s = file.get_double("ramp_duration_s");
  wp.steep_slope_hz_per_s = file.get_double("steep_slope_hz_per_s");
  wp.ratio_rt = file.get_double("ratio_rt");
  wp.emitted_frequency_hz = file.get_double("emitted_frequency_hz");
  wp.hp_cutoff_hz = file.get_double("hp_cutoff_hz");
  wp.sampling_rate_hz = file.get_double("sampling_rate_hz");
  validate(wp);
  return wp;
}

}  // namespace lfi
