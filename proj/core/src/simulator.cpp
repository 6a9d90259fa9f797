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

#include "lfi/simulator.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "lfi/constants.hpp"
#include "lfi/errors.hpp"

namespace lfi {
namespace {

// Quality factors of the two second-order sections of a 4th-order Butterworth.
constexpr std::array<double, 2> kSectionQ = {0.54119610014619698, 1.3065629648763766};

struct Biquad {
  double b0, b1, b2, a1, a2;
};

std::array<Biquad, 2> design_highpass(double cutoff_hz, double sampling_rate_hz) {
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sampling_rate_hz;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  std::array<Biquad, 2> sections{};
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const double alpha = sw / (2.0 * kSectionQ[i]);
    const double a0 = 1.0 + alpha;
    const double b = 0.5 * (1.0 + cw) / a0;
    sections[i] = Biquad{b, -2.0 * b, b, -2.0 * cw / a0, (1.0 - alpha) / a0};
  }
  return sections;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Samples needed for the slowest filter mode to decay by ~e^-20.
std::size_t settle_samples(const WorkingPoint& wp) {
  if (wp.hp_cutoff_hz <= 0.0) return 0;
  const double tau = 2.0 * kSectionQ[1] / (2.0 * std::numbers::pi * wp.hp_cutoff_hz);
  return static_cast<std::size_t>(std::ceil(20.0 * tau * wp.sampling_rate_hz));
}

}  // namespace

double signed_beat(const WorkingPoint& wp, double slope_hz_per_s, const GroundTruth& gt) {
  return (2.0 * gt.distance_m * slope_hz_per_s + wp.emitted_frequency_hz * gt.velocity_mps) / kSpeedOfLight;
}

double signed_beat(const WorkingPoint& wp, const RampDescriptor& ramp, const GroundTruth& gt) {
  return signed_beat(wp, ramp.slope_hz_per_s, gt);
}

std::array<double, 4> signed_beats(const WorkingPoint& wp, const GroundTruth& gt) {
  const auto slopes = ramp_slopes(wp);
  std::array<double, 4> beats{};
  for (std::size_t i = 0; i < 4; ++i) beats[i] = signed_beat(wp, slopes[i], gt);
  return beats;
}

std::vector<double> highpass(std::span<const double> samples, const WorkingPoint& wp) {
  std::vector<double> out(samples.begin(), samples.end());
  if (wp.hp_cutoff_hz <= 0.0) return out;
  if (!(wp.sampling_rate_hz > 2.0 * wp.hp_cutoff_hz)) {
    throw ParameterError("highpass: sampling_rate_hz must exceed 2 * hp_cutoff_hz");
  }
  for (const auto& s : design_highpass(wp.hp_cutoff_hz, wp.sampling_rate_hz)) {
    // Transposed direct form II.
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& x : out) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return out;
}

double highpass_gain(const WorkingPoint& wp, double frequency_hz) {
  if (wp.hp_cutoff_hz <= 0.0) return 1.0;
  const double w = 2.0 * std::numbers::pi * frequency_hz / wp.sampling_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& s : design_highpass(wp.hp_cutoff_hz, wp.sampling_rate_hz)) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

SyntheticFrame synthesize_frame(const WorkingPoint& wp, const RampDescriptor& ramp, const GroundTruth& gt,
                                double amplitude, double noise_sigma, std::uint64_t seed) {
  validate(wp);
  if (!(amplitude >= 0.0)) throw ParameterError("synthesize_frame: amplitude must be >= 0");
  if (!(noise_sigma >= 0.0)) throw ParameterError("synthesize_frame: noise_sigma must be >= 0");

  SyntheticFrame frame;
  frame.ramp = ramp;
  frame.true_signed_beat_hz = signed_beat(wp, ramp, gt);
  frame.blind = std::abs(frame.true_signed_beat_hz) < wp.hp_cutoff_hz;
  const double f = std::abs(frame.true_signed_beat_hz);
  if (f >= wp.nyquist_hz()) {
    throw AliasingError("beat frequency " + std::to_string(f) + " Hz is at or above Nyquist");
  }

  const std::size_t n = static_cast<std::size_t>(std::llround(ramp.duration_s * wp.sampling_rate_hz));
  const std::size_t preroll = settle_samples(wp);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double phase = phase_dist(rng);

  std::vector<double> raw(preroll + n);
  const double w = 2.0 * std::numbers::pi * f / wp.sampling_rate_hz;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double k = static_cast<double>(i) - static_cast<double>(preroll);
    raw[i] = amplitude * std::cos(w * k + phase);
    if (noise_sigma > 0.0) raw[i] += noise_sigma * noise(rng);
  }
  auto filtered = highpass(raw, wp);
  frame.samples.assign(filtered.begin() + static_cast<std::ptrdiff_t>(preroll), filtered.end());
  return frame;
}

std::uint64_t frame_seed(std::uint64_t stream_seed, std::uint64_t cycle, std::size_t ramp_index) {
  return splitmix64(splitmix64(stream_seed ^ splitmix64(cycle)) + ramp_index);
}

}  // namespace lfi
