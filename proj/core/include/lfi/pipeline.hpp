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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfi/analysis.hpp"
#include "lfi/keyvalue.hpp"
#include "lfi/modulation.hpp"
#include "lfi/peaks.hpp"
#include "lfi/simulator.hpp"
#include "lfi/solver.hpp"
#include "lfi/spectral.hpp"

namespace lfi {

struct PipelineConfig {
  WorkingPoint working_point;
  std::size_t fft_bins = kDefaultFftBins;
  PeakConfig peaks;
  std::size_t n_avg = 1;
  double alpha = 1.0;
  double beta = 0.0;
  std::size_t sync_offset_samples = 0;  // applied by cycle sources
  SolverConfig solver;
  std::optional<NoiseModelCoefficients> noise_model;  // feeds sigma_R / sigma_v
};

void validate(const PipelineConfig& config);

/// Keys accepted in a pipeline configuration file.
[[nodiscard]] std::span<const std::string_view> pipeline_config_keys();

/// Builds a configuration from a flat key-value file; unknown keys are
/// rejected and missing keys take their defaults.
[[nodiscard]] PipelineConfig pipeline_config_from(const KeyValueFile& file);
[[nodiscard]] KeyValueFile to_key_value(const PipelineConfig& config);

struct CycleRecord {
  std::uint64_t cycle_index = 0;
  double timestamp_s = 0.0;
  std::array<PeakEstimate, 4> peaks{};
  Measurement measurement;
  std::size_t frames_averaged = 0;
  bool warmup = false;  // fewer than n_avg frames in the averaging window
};

/// Sliding-average history of the four ramp indices plus the cycle counter.
struct AveragingState {
  explicit AveragingState(std::size_t n_avg = 1);

  std::array<SpectrumHistory, 4> history;
  std::uint64_t next_cycle = 0;
};

/// Runs one modulation cycle through slicing, windowed FFT, sliding average,
/// floor subtraction, peak interpolation and sign disambiguation. Updates
/// `state`. Solver failures are reported through the measurement status.
[[nodiscard]] CycleRecord process_cycle(std::span<const double> samples, AveragingState& state,
                                        const PipelineConfig& config, const CalibrationSet& calibration);

/// Per-ramp beat sigma predicted by the configured noise model for a solved
/// measurement; nullopt without a model or outside the model's log domain.
[[nodiscard]] std::optional<std::array<double, 4>> predicted_beat_sigmas(const PipelineConfig& config,
                                                                         const std::array<PeakEstimate, 4>& peaks,
                                                                         const Measurement& measurement);

// ---------------------------------------------------------------------------
// Cycle sources
// ---------------------------------------------------------------------------

class CycleSource {
 public:
  virtual ~CycleSource() = default;
  /// Next cycle of samples; nullopt once the source is exhausted.
  virtual std::optional<std::vector<double>> next() = 0;
};

struct SyntheticOptions {
  std::function<GroundTruth(std::uint64_t cycle)> trajectory;  // constant target when empty
  GroundTruth target;
  double amplitude = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t n_cycles = 0;
  bool target_present = true;
  std::optional<std::size_t> forced_blind_ramp;  // that ramp carries noise only
};

struct SyntheticCycle {
  std::uint64_t cycle_index = 0;
  GroundTruth truth;
  std::array<SyntheticFrame, 4> frames;
  std::array<std::uint64_t, 4> seeds{};
};

/// Simulator-backed source. Samples are rounded to 32-bit float, the same
/// representation used by exported frame files, so replays are bit-identical.
class SyntheticSource final : public CycleSource {
 public:
  SyntheticSource(WorkingPoint wp, SyntheticOptions options);

  std::optional<std::vector<double>> next() override;
  std::optional<SyntheticCycle> next_cycle();

  [[nodiscard]] static std::vector<double> flatten(const SyntheticCycle& cycle);

 private:
  WorkingPoint wp_;
  RampCycle ramps_;
  SyntheticOptions options_;
  std::uint64_t cycle_ = 0;
};

/// Little-endian float32 sample stream, e.g. frames exported by `synth`.
/// Skips `sync_offset_samples` leading samples, then yields whole cycles.
class ReplaySource final : public CycleSource {
 public:
  ReplaySource(const std::string& raw_path, std::size_t samples_per_cycle, std::size_t sync_offset_samples = 0);
  ~ReplaySource() override;

  std::optional<std::vector<double>> next() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Stateful fold of process_cycle over a source, one record per input cycle.
class RecordStream {
 public:
  RecordStream(CycleSource& source, PipelineConfig config, CalibrationSet calibration);

  std::optional<CycleRecord> next();
  [[nodiscard]] const AveragingState& state() const { return state_; }

 private:
  CycleSource* source_;
  PipelineConfig config_;
  CalibrationSet calibration_;
  AveragingState state_;
};

[[nodiscard]] RecordStream run_stream(CycleSource& source, const PipelineConfig& config,
                                      const CalibrationSet& calibration);

/// Drains a source; convenience for tests and batch tools.
[[nodiscard]] std::vector<CycleRecord> run_all(CycleSource& source, const PipelineConfig& config,
                                               const CalibrationSet& calibration);

/// Captures a calibration from `n_cycles` no-target cycles of a source.
[[nodiscard]] CalibrationSet capture_calibration(CycleSource& source, const WorkingPoint& wp,
                                                 std::size_t fft_bins, std::uint64_t n_cycles);

}  // namespace lfi
