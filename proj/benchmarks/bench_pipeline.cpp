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

#include <benchmark/benchmark.h>

#include "lfi/pipeline.hpp"

namespace {

using namespace lfi;

std::vector<double> test_cycle(const WorkingPoint& wp) {
  SyntheticOptions o;
  o.target = {0.05, 0.02};
  o.noise_sigma = 0.05;
  o.seed = 1;
  o.n_cycles = 1;
  SyntheticSource src(wp, o);
  return *src.next();
}

void BM_FrameSpectrum(benchmark::State& state) {
  const WorkingPoint wp;
  const auto frames = slice_cycle(test_cycle(wp), wp);
  for (auto _ : state) benchmark::DoNotOptimize(frame_spectrum(frames[0], wp, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_FrameSpectrum)->Arg(2048)->Arg(8192);

void BM_Interpolate(benchmark::State& state) {
  const WorkingPoint wp;
  const auto spec = frame_spectrum(slice_cycle(test_cycle(wp), wp)[0], wp);
  const auto c = *find_max_bin(spec);
  const bool gaussian = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian ? gaussian_interpolate(spec, c) : weighted_average_interpolate(spec, c));
  }
  state.SetLabel(gaussian ? "gaussian" : "weighted_average");
}
BENCHMARK(BM_Interpolate)->Arg(0)->Arg(1);

void BM_Disambiguate(benchmark::State& state) {
  const WorkingPoint wp;
  std::array<PeakEstimate, 4> peaks{};
  const auto beats = signed_beats(wp, {0.05, 0.02});
  for (std::size_t i = 0; i < 4; ++i) {
    peaks[i].ramp_index = i;
    peaks[i].beat_frequency_hz = std::abs(beats[i]);
    peaks[i].intensity = 1.0 + double(i);
    peaks[i].valid = true;
  }
  for (auto _ : state) benchmark::DoNotOptimize(disambiguate(peaks, wp));
}
BENCHMARK(BM_Disambiguate);

void BM_ProcessCycle(benchmark::State& state) {
  PipelineConfig cfg;
  cfg.n_avg = static_cast<std::size_t>(state.range(0));
  const auto cal = CalibrationSet::zero(cfg.working_point, cfg.fft_bins);
  const auto cycle = test_cycle(cfg.working_point);
  AveragingState avg(cfg.n_avg);
  for (auto _ : state) benchmark::DoNotOptimize(process_cycle(cycle, avg, cfg, cal));
  state.counters["cycles/s"] = benchmark::Counter(double(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ProcessCycle)->Arg(1)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
