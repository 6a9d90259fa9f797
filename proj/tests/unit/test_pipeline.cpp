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
#include <sstream>

#include "lfi/errors.hpp"
#include "lfi/pipeline.hpp"

using namespace lfi;

namespace {

std::vector<double> cycle_for(const WorkingPoint& wp, GroundTruth gt, double noise = 0.0, std::uint64_t seed = 1) {
  SyntheticOptions o;
  o.target = gt;
  o.noise_sigma = noise;
  o.seed = seed;
  o.n_cycles = 1;
  SyntheticSource src(wp, o);
  return *src.next();
}

void check_same(const CycleRecord& a, const CycleRecord& b) {
  CHECK(a.measurement.status == b.measurement.status);
  CHECK(a.measurement.distance_m == b.measurement.distance_m);
  CHECK(a.measurement.velocity_mps == b.measurement.velocity_mps);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.peaks[i].beat_frequency_hz == b.peaks[i].beat_frequency_hz);
    CHECK(a.peaks[i].intensity == b.peaks[i].intensity);
  }
}

}  // namespace

TEST_CASE("a clean cycle recovers the target") {
  const PipelineConfig cfg;
  const auto cal = CalibrationSet::zero(cfg.working_point, cfg.fft_bins);
  AveragingState state(cfg.n_avg);
  const GroundTruth gt{0.05, 0.02};
  const auto rec = process_cycle(cycle_for(cfg.working_point, gt), state, cfg, cal);
  CHECK(rec.cycle_index == 0);
  CHECK(rec.timestamp_s == 0.0);
  CHECK(rec.measurement.status == MeasurementStatus::kOk);
  CHECK(rec.measurement.distance_m == doctest::Approx(gt.distance_m).epsilon(0.005));
  CHECK(rec.measurement.velocity_mps == doctest::Approx(gt.velocity_mps).epsilon(0.005));
  CHECK_FALSE(rec.warmup);
  CHECK(std::isnan(rec.measurement.sigma_distance_m));

  const auto next = process_cycle(cycle_for(cfg.working_point, gt), state, cfg, cal);
  CHECK(next.cycle_index == 1);
  CHECK(next.timestamp_s == doctest::Approx(cfg.working_point.cycle_duration_s()));
  std::vector<double> short_cycle(10, 0.0);
  CHECK_THROWS_AS(process_cycle(short_cycle, state, cfg, cal), FramingError);
}

TEST_CASE("pure noise with a calibrated floor yields invalid records") {
  PipelineConfig cfg;
  SyntheticOptions o;
  o.target_present = false;
  o.noise_sigma = 0.05;
  o.seed = 4;
  o.n_cycles = 64;
  SyntheticSource cal_src(cfg.working_point, o);
  const auto cal = capture_calibration(cal_src, cfg.working_point, cfg.fft_bins, 64);
  o.seed = 5;
  o.n_cycles = 50;
  SyntheticSource src(cfg.working_point, o);
  const auto records = run_all(src, cfg, cal);
  REQUIRE(records.size() == 50);
  for (const auto& r : records) CHECK(r.measurement.status == MeasurementStatus::kInvalid);
}

TEST_CASE("two identical cycles at n_avg = 2 equal one cycle at n_avg = 1") {
  PipelineConfig one, two;
  two.n_avg = 2;
  const auto cal = CalibrationSet::zero(one.working_point, one.fft_bins);
  const auto c = cycle_for(one.working_point, {0.03, -0.04}, 0.02, 9);
  AveragingState s1(1), s2(2);
  const auto a = process_cycle(c, s1, one, cal);
  const auto w = process_cycle(c, s2, two, cal);
  CHECK(w.warmup);
  CHECK(w.frames_averaged == 1);
  const auto b = process_cycle(c, s2, two, cal);
  CHECK_FALSE(b.warmup);
  CHECK(b.frames_averaged == 2);
  CHECK(a.measurement.distance_m == doctest::Approx(b.measurement.distance_m).epsilon(1e-12));
  CHECK(a.measurement.velocity_mps == doctest::Approx(b.measurement.velocity_mps).epsilon(1e-12));
}

TEST_CASE("one record per cycle; a step settles within n_avg cycles") {
  PipelineConfig cfg;
  cfg.n_avg = 4;
  const GroundTruth before{0.03, 0.01}, after{0.07, -0.02};
  SyntheticOptions o;
  o.trajectory = [&](std::uint64_t i) { return i < 10 ? before : after; };
  o.n_cycles = 20;
  SyntheticSource src(cfg.working_point, o);
  const auto records = run_all(src, cfg, CalibrationSet::zero(cfg.working_point, cfg.fft_bins));
  REQUIRE(records.size() == 20);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].cycle_index == i);
    CHECK(records[i].warmup == (i < 3));
  }
  for (std::size_t i = 13; i < 20; ++i) {
    CHECK(records[i].measurement.distance_m == doctest::Approx(after.distance_m).epsilon(0.005));
    CHECK(records[i].measurement.velocity_mps == doctest::Approx(after.velocity_mps).epsilon(0.005));
  }
  CHECK(records[9].measurement.distance_m == doctest::Approx(before.distance_m).epsilon(0.005));
}

TEST_CASE("streaming equals folding process_cycle, and runs are deterministic") {
  PipelineConfig cfg;
  cfg.n_avg = 3;
  const auto cal = CalibrationSet::zero(cfg.working_point, cfg.fft_bins);
  SyntheticOptions o;
  o.target = {0.06, 0.05};
  o.noise_sigma = 0.05;
  o.seed = 77;
  o.n_cycles = 12;
  SyntheticSource a(cfg.working_point, o), b(cfg.working_point, o), c(cfg.working_point, o);
  const auto ra = run_all(a, cfg, cal);
  const auto rb = run_all(b, cfg, cal);
  AveragingState state(cfg.n_avg);
  REQUIRE(ra.size() == 12);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    check_same(ra[i], rb[i]);
    check_same(ra[i], process_cycle(*c.next(), state, cfg, cal));
  }
  CHECK_FALSE(c.next().has_value());
}

TEST_CASE("a forced blind ramp degrades but still solves") {
  PipelineConfig cfg;
  SyntheticOptions o;
  o.target = {0.05, 0.03};
  o.n_cycles = 1;
  for (std::size_t k = 0; k < 4; ++k) {
    o.forced_blind_ramp = k;
    SyntheticSource src(cfg.working_point, o);
    const auto r = run_all(src, cfg, CalibrationSet::zero(cfg.working_point, cfg.fft_bins));
    REQUIRE(r.size() == 1);
    CHECK_FALSE(r[0].peaks[k].valid);
    CHECK(r[0].measurement.status == MeasurementStatus::kDegraded);
    CHECK(r[0].measurement.distance_m == doctest::Approx(0.05).epsilon(0.005));
  }
}

TEST_CASE("a configured noise model fills in sigmas") {
  PipelineConfig cfg;
  NoiseModelCoefficients c;
  c.intercept = 2.0;  // 100 Hz everywhere
  cfg.noise_model = c;
  AveragingState state(1);
  const auto rec = process_cycle(cycle_for(cfg.working_point, {0.05, 0.02}), state, cfg,
                                 CalibrationSet::zero(cfg.working_point, cfg.fft_bins));
  const auto sig = predicted_beat_sigmas(cfg, rec.peaks, rec.measurement);
  REQUIRE(sig);
  for (double s : *sig) CHECK(s == doctest::Approx(100.0));
  // Steepest pair among the selected ramps.
  const auto slopes = ramp_slopes(cfg.working_point);
  const auto& sel = rec.measurement.selected_ramps;
  REQUIRE(sel.size() == 3);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      if (std::abs(slopes[sel[a]] - slopes[sel[b]]) > std::abs(s1 - s2)) {
        s1 = slopes[sel[a]];
        s2 = slopes[sel[b]];
      }
    }
  }
  const auto expect = propagate_noise(100.0, 100.0, s1, s2, cfg.working_point.emitted_frequency_hz);
  CHECK(rec.measurement.sigma_distance_m == doctest::Approx(expect.sigma_distance_m));
  CHECK(rec.measurement.sigma_velocity_mps == doctest::Approx(expect.sigma_velocity_mps));
}

TEST_CASE("configuration files") {
  std::istringstream text(
      "# test config\n"
      "n_avg = 8\n"
      "interp_method = gaussian\n"
      "hp_cutoff_hz = 5000\n"
      "beta = 1\n");
  const auto cfg = pipeline_config_from(KeyValueFile::parse(text));
  CHECK(cfg.n_avg == 8);
  CHECK(cfg.peaks.method == InterpMethod::kGaussian);
  CHECK(cfg.working_point.hp_cutoff_hz == 5000.0);
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.fft_bins == 2048);
  CHECK(cfg.peaks.window == 25);

  const auto back = pipeline_config_from(to_key_value(cfg));
  CHECK(back.n_avg == cfg.n_avg);
  CHECK(back.working_point == cfg.working_point);
  CHECK(back.peaks.method == cfg.peaks.method);

  std::istringstream unknown("n_avgs = 2\n");
  CHECK_THROWS_AS(pipeline_config_from(KeyValueFile::parse(unknown)), Error);
  std::istringstream partial("noise_a1 = 0.5\n");
  CHECK_THROWS_AS(pipeline_config_from(KeyValueFile::parse(partial)), Error);
  std::istringstream zero("n_avg = 0\n");
  CHECK_THROWS_AS(pipeline_config_from(KeyValueFile::parse(zero)), ParameterError);
  PipelineConfig bad;
  bad.fft_bins = 1000;
  CHECK_THROWS_AS(validate(bad), ParameterError);
}
