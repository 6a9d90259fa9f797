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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lfi/errors.hpp"
#include "lfi/simulator.hpp"
#include "oracles.hpp"

using namespace lfi;

namespace {

double rms(const std::vector<double>& x, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s / double(x.size() - from));
}

}  // namespace

TEST_CASE("signed beat is zero for a target at rest at the aperture") {
  const WorkingPoint wp;
  for (const auto& r : build_cycle(wp)) CHECK(signed_beat(wp, r, GroundTruth{0.0, 0.0}) == 0.0);
}

TEST_CASE("distance-only beat closes through the pair inversion") {
  WorkingPoint wp;
  wp.steep_slope_hz_per_s = 1.67e14;
  const GroundTruth gt{0.03, 0.0};
  const auto c = build_cycle(wp);
  const double up = signed_beat(wp, c[0], gt);
  const double down = signed_beat(wp, c[1], gt);
  CHECK(up == doctest::Approx(2.0 * 0.03 * 1.67e14 / oracle::kC).epsilon(1e-14));
  const auto [r, v] = oracle::invert_pair(up, c[0].slope_hz_per_s, down, c[1].slope_hz_per_s, wp.emitted_frequency_hz);
  CHECK(r == doctest::Approx(0.03).epsilon(1e-13));
  CHECK(v == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("velocity-only beat is the same on every ramp and closes") {
  const WorkingPoint wp;
  const GroundTruth gt{0.0, 0.1};
  const auto beats = signed_beats(wp, gt);
  for (double f : beats) CHECK(f == doctest::Approx(wp.emitted_frequency_hz * 0.1 / oracle::kC).epsilon(1e-14));
  const auto s = ramp_slopes(wp);
  const auto [r, v] = oracle::invert_pair(beats[2], s[2], beats[1], s[1], wp.emitted_frequency_hz);
  CHECK(v == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(std::abs(r) < 1e-15);
}

TEST_CASE("signed beat is affine in distance and velocity; mirror symmetric") {
  const WorkingPoint wp;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.0, 0.1), uv(-0.1, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    const GroundTruth g{ur(rng), uv(rng)};
    for (double slope : ramp_slopes(wp)) {
      const double f0 = signed_beat(wp, slope, g);
      const double dr = signed_beat(wp, slope, {g.distance_m + 0.01, g.velocity_mps}) - f0;
      const double dr2 = signed_beat(wp, slope, {g.distance_m + 0.02, g.velocity_mps}) - f0;
      CHECK(dr2 == doctest::Approx(2.0 * dr).epsilon(1e-9));
      const double dv = signed_beat(wp, slope, {g.distance_m, g.velocity_mps + 0.01}) - f0;
      const double dv2 = signed_beat(wp, slope, {g.distance_m, g.velocity_mps + 0.02}) - f0;
      CHECK(dv2 == doctest::Approx(2.0 * dv).epsilon(1e-9));
      CHECK(signed_beat(wp, slope, {-g.distance_m, -g.velocity_mps}) == doctest::Approx(-f0).epsilon(1e-15));
    }
  }
}

TEST_CASE("high-pass response meets the blind-region mask") {
  const WorkingPoint wp;
  const double fc = wp.hp_cutoff_hz;
  CHECK(20.0 * std::log10(highpass_gain(wp, fc / 2)) <= -20.0);
  CHECK(20.0 * std::log10(highpass_gain(wp, 2 * fc)) >= -3.0);
  CHECK(highpass_gain(wp, fc) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  for (double f : {1e3, 5e3, 2e4, 1e5}) {
    // Bilinear warping is negligible this far below Nyquist.
    CHECK(highpass_gain(wp, f) == doctest::Approx(oracle::butterworth_hp_gain(f, fc, 4)).epsilon(1e-3));
  }
}

TEST_CASE("high-pass: zero in, zero out; tone well above cutoff preserved; DC removed") {
  const WorkingPoint wp;
  const std::size_t n = 8192;
  const std::vector<double> zeros(n, 0.0);
  for (double y : highpass(zeros, wp)) CHECK(y == 0.0);

  std::vector<double> tone(n);
  const double f = 10.0 * wp.hp_cutoff_hz;
  for (std::size_t i = 0; i < n; ++i) tone[i] = std::cos(2.0 * std::numbers::pi * f * double(i) / wp.sampling_rate_hz);
  const auto y = highpass(tone, wp);
  const double ratio_db = 20.0 * std::log10(rms(y, n / 2) / rms(tone, n / 2));
  CHECK(std::abs(ratio_db) < 1.0);
  CHECK(ratio_db == doctest::Approx(20.0 * std::log10(oracle::butterworth_hp_gain(f, wp.hp_cutoff_hz, 4))).epsilon(0.05));

  const std::vector<double> dc(n, 3.0);
  const auto ydc = highpass(dc, wp);
  double tail_mean = 0.0;
  for (std::size_t i = n - 1024; i < n; ++i) tail_mean += ydc[i] / 1024.0;
  CHECK(std::abs(tail_mean) < 1e-6);

  WorkingPoint bypass = wp;
  bypass.hp_cutoff_hz = 0.0;
  CHECK(highpass(tone, bypass) == tone);
}

TEST_CASE("clean frame peaks within one bin of the beat") {
  const WorkingPoint wp;
  const auto cycle = build_cycle(wp);
  const GroundTruth gt{0.04, 0.01};
  for (const auto& ramp : cycle) {
    const auto frame = synthesize_frame(wp, ramp, gt, 1.0, 0.0, 11);
    REQUIRE(frame.samples.size() == wp.samples_per_ramp());
    CHECK_FALSE(frame.blind);
    const auto mags = oracle::dft_magnitudes(frame.samples, 2048);
    std::size_t best = 0;
    for (std::size_t k = 1; k < mags.size(); ++k) {
      if (mags[k] > mags[best]) best = k;
    }
    const double bin = wp.sampling_rate_hz / 2048.0;
    CHECK(std::abs(double(best) * bin - std::abs(frame.true_signed_beat_hz)) <= bin);
  }
}

TEST_CASE("beats below the cutoff are attenuated by at least 20 dB") {
  WorkingPoint wp;
  const auto ramp = build_cycle(wp)[0];
  // Steep-ramp beat at hp_cutoff / 2 from distance alone.
  const double r_blind = 0.5 * wp.hp_cutoff_hz * oracle::kC / (2.0 * wp.steep_slope_hz_per_s);
  const auto blind = synthesize_frame(wp, ramp, {r_blind, 0.0}, 1.0, 0.0, 1);
  const auto pass = synthesize_frame(wp, ramp, {0.05, 0.0}, 1.0, 0.0, 1);
  CHECK(blind.blind);
  CHECK_FALSE(pass.blind);
  const double atten_db = 20.0 * std::log10(rms(blind.samples) / rms(pass.samples));
  const double analytic_db = 20.0 * std::log10(highpass_gain(wp, wp.hp_cutoff_hz / 2) /
                                               highpass_gain(wp, std::abs(pass.true_signed_beat_hz)));
  CHECK(atten_db <= -20.0);
  CHECK(atten_db == doctest::Approx(analytic_db).epsilon(0.02));
}

TEST_CASE("synthesis is deterministic per seed") {
  const WorkingPoint wp;
  const auto ramp = build_cycle(wp)[2];
  const auto a = synthesize_frame(wp, ramp, {0.03, -0.05}, 1.0, 0.1, 99);
  const auto b = synthesize_frame(wp, ramp, {0.03, -0.05}, 1.0, 0.1, 99);
  const auto c = synthesize_frame(wp, ramp, {0.03, -0.05}, 1.0, 0.1, 100);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK(frame_seed(1, 2, 3) == frame_seed(1, 2, 3));
  CHECK(frame_seed(1, 2, 3) != frame_seed(1, 3, 2));
}

TEST_CASE("synthesis errors") {
  WorkingPoint wp;
  const auto ramp = build_cycle(wp)[0];
  CHECK_THROWS_AS((void)synthesize_frame(wp, ramp, {0.01, 0.0}, -1.0, 0.0, 0), ParameterError);
  CHECK_THROWS_AS((void)synthesize_frame(wp, ramp, {0.01, 0.0}, 1.0, -0.1, 0), ParameterError);
  // Beat above Nyquist.
  CHECK_THROWS_AS((void)synthesize_frame(wp, ramp, {1.0, 0.0}, 1.0, 0.0, 0), AliasingError);
}
