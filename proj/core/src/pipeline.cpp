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

#include "lfi/pipeline.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "lfi/errors.hpp"

namespace lfi {
namespace {

constexpr std::array<std::string_view, 25> kConfigKeys = {
    "ramp_duration_s",       "steep_slope_hz_per_s",     "ratio_rt",
    "emitted_frequency_hz",  "hp_cutoff_hz",             "sampling_rate_hz",
    "fft_bins",              "interp_window",            "interp_method",
    "n_avg",                 "alpha",                    "beta",
    "sync_offset_samples",   "validity_abs_floor",       "validity_kappa_median",
    "validity_kappa_sigma",  "cluster_distance_scale_m", "cluster_velocity_scale_mps",
    "noise_a1",              "noise_a2",                 "noise_a3",
    "noise_a4",              "noise_a5",                 "noise_b",
    "noise_fit_residual"};

std::size_t get_count(const KeyValueFile& file, std::string_view key, std::size_t fallback) {
  const auto v = file.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ParameterError(std::string(key) + " must be >= 0");
  return static_cast<std::size_t>(v);
}

}  // namespace

void validate(const PipelineConfig& config) {
  validate(config.working_point);
  if (!std::has_single_bit(config.fft_bins)) throw ParameterError("fft_bins must be a power of two");
  if (config.fft_bins < config.working_point.samples_per_ramp()) {
    throw ParameterError("fft_bins must not be smaller than the samples per ramp");
  }
  if (config.peaks.window == 0 || config.peaks.window % 2 == 0) throw ParameterError("interp_window must be odd");
  if (config.n_avg < 1) throw ParameterError("n_avg must be >= 1");
  if (!(config.alpha >= 0.0) || !(config.beta >= 0.0)) throw ParameterError("alpha and beta must be >= 0");
  if (!(config.solver.distance_scale_m > 0.0) || !(config.solver.velocity_scale_mps > 0.0)) {
    throw ParameterError("cluster scales must be > 0");
  }
}

std::span<const std::string_view> pipeline_config_keys() { return kConfigKeys; }

PipelineConfig pipeline_config_from(const KeyValueFile& file) {
  file.reject_unknown(kConfigKeys);
  PipelineConfig cfg;
  auto& wp = cfg.working_point;
  wp.ramp_duration_s = file.get_double("ramp_duration_s", wp.ramp_duration_s);
  wp.steep_slope_hz_per_s = file.get_double("steep_slope_hz_per_s", wp.steep_slope_hz_per_s);
  wp.ratio_rt = file.get_double("ratio_rt", wp.ratio_rt);
  wp.emitted_frequency_hz = file.get_double("emitted_frequency_hz", wp.emitted_frequency_hz);
  wp.hp_cutoff_hz = file.get_double("hp_cutoff_hz", wp.hp_cutoff_hz);
  wp.sampling_rate_hz = file.get_double("sampling_rate_hz", wp.sampling_rate_hz);
  cfg.fft_bins = get_count(file, "fft_bins", cfg.fft_bins);
  cfg.peaks.window = get_count(file, "interp_window", cfg.peaks.window);
  if (auto m = file.find("interp_method")) cfg.peaks.method = parse_interp_method(*m);
  cfg.n_avg = get_count(file, "n_avg", cfg.n_avg);
  cfg.alpha = file.get_double("alpha", cfg.alpha);
  cfg.beta = file.get_double("beta", cfg.beta);
  cfg.sync_offset_samples = get_count(file, "sync_offset_samples", 0);
  cfg.peaks.validity.abs_floor = file.get_double("validity_abs_floor", cfg.peaks.validity.abs_floor);
  cfg.peaks.validity.kappa_median = file.get_double("validity_kappa_median", cfg.peaks.validity.kappa_median);
  cfg.peaks.validity.kappa_sigma = file.get_double("validity_kappa_sigma", cfg.peaks.validity.kappa_sigma);
  cfg.solver.distance_scale_m = file.get_double("cluster_distance_scale_m", cfg.solver.distance_scale_m);
  cfg.solver.velocity_scale_mps = file.get_double("cluster_velocity_scale_mps", cfg.solver.velocity_scale_mps);

  constexpr std::array<std::string_view, 6> kNoiseKeys = {"noise_a1", "noise_a2", "noise_a3",
                                                          "noise_a4", "noise_a5", "noise_b"};
  std::size_t present = 0;
  for (auto k : kNoiseKeys) present += file.contains(k) ? 1 : 0;
  if (present != 0 && present != kNoiseKeys.size()) {
    throw FormatError("noise model keys noise_a1..noise_a5 and noise_b must be given together");
  }
  if (present == kNoiseKeys.size()) {
    NoiseModelCoefficients c;
    for (std::size_t i = 0; i < 5; ++i) c.slopes[i] = file.get_double(kNoiseKeys[i]);
    c.intercept = file.get_double("noise_b");
    c.fit_residual = file.get_double("noise_fit_residual", 0.0);
    cfg.noise_model = c;
  }
  validate(cfg);
  return cfg;
}

KeyValueFile to_key_value(const PipelineConfig& cfg) {
  KeyValueFile f;
  const auto& wp = cfg.working_point;
  f.set("ramp_duration_s", format_double(wp.ramp_duration_s));
  f.set("steep_slope_hz_per_s", format_double(wp.steep_slope_hz_per_s));
  f.set("ratio_rt", format_double(wp.ratio_rt));
  f.set("emitted_frequency_hz", format_double(wp.emitted_frequency_hz));
  f.set("hp_cutoff_hz", format_double(wp.hp_cutoff_hz));
  f.set("sampling_rate_hz", format_double(wp.sampling_rate_hz));
  f.set("fft_bins", std::to_string(cfg.fft_bins));
  f.set("interp_window", std::to_string(cfg.peaks.window));
  f.set("interp_method", std::string(to_string(cfg.peaks.method)));
  f.set("n_avg", std::to_string(cfg.n_avg));
  f.set("alpha", format_double(cfg.alpha));
  f.set("beta", format_double(cfg.beta));
  f.set("sync_offset_samples", std::to_string(cfg.sync_offset_samples));
  f.set("validity_abs_floor", format_double(cfg.peaks.validity.abs_floor));
  f.set("validity_kappa_median", format_double(cfg.peaks.validity.kappa_median));
  f.set("validity_kappa_sigma", format_double(cfg.peaks.validity.kappa_sigma));
  f.set("cluster_distance_scale_m", format_double(cfg.solver.distance_scale_m));
  f.set("cluster_velocity_scale_mps", format_double(cfg.solver.velocity_scale_mps));
  if (cfg.noise_model) {
    for (std::size_t i = 0; i < 5; ++i) f.set("noise_a" + std::to_string(i + 1), format_double(cfg.noise_model->slopes[i]));
    f.set("noise_b", format_double(cfg.noise_model->intercept));
    f.set("noise_fit_residual", format_double(cfg.noise_model->fit_residual));
  }
  return f;
}

AveragingState::AveragingState(std::size_t n_avg)
    : history{SpectrumHistory(n_avg), SpectrumHistory(n_avg), SpectrumHistory(n_avg), SpectrumHistory(n_avg)} {}

std::optional<std::array<double, 4>> predicted_beat_sigmas(const PipelineConfig& config,
                                                           const std::array<PeakEstimate, 4>& peaks,
                                                           const Measurement& measurement) {
  if (!config.noise_model || measurement.status == MeasurementStatus::kInvalid) return std::nullopt;
  const auto& wp = config.working_point;
  const auto slopes = ramp_slopes(wp);
  std::array<double, 4> sigmas{};
  for (std::size_t i = 0; i < 4; ++i) {
    const NoiseRegressors r{wp.ramp_rate_hz(),
                            std::abs(slopes[i]),
                            peaks[i].beat_frequency_hz,
                            std::abs(measurement.velocity_mps),
                            measurement.distance_m,
                            static_cast<double>(config.n_avg)};
    const bool in_domain = r.beat_hz > 0.0 && r.velocity_mps > 0.0 && r.distance_m > 0.0;
    sigmas[i] = in_domain ? predict_sigma_fb(*config.noise_model, r) : std::numeric_limits<double>::quiet_NaN();
  }
  return sigmas;
}

CycleRecord process_cycle(std::span<const double> samples, AveragingState& state, const PipelineConfig& config,
                          const CalibrationSet& calibration) {
  const auto& wp = config.working_point;
  const auto frames = slice_cycle(samples, wp);

  CycleRecord record;
  record.cycle_index = state.next_cycle;
  record.timestamp_s = static_cast<double>(state.next_cycle) * wp.cycle_duration_s();
  for (std::size_t i = 0; i < 4; ++i) {
    auto& history = state.history[i];
    history.push(frame_spectrum(frames[i], wp, config.fft_bins, i));
    const auto averaged = history.average();
    const auto& profile = calibration.ramps[i];
    const auto floored = subtract_floor(averaged, profile, config.alpha, config.beta);

    // Per-bin noise of an n-frame average.
    const double shrink = 1.0 / std::sqrt(static_cast<double>(history.size()));
    std::vector<double> floor_sigma(profile.reference_sigma.size());
    for (std::size_t k = 0; k < floor_sigma.size(); ++k) floor_sigma[k] = profile.reference_sigma[k] * shrink;

    record.peaks[i] = estimate_peak(floored, config.peaks, floor_sigma);
    record.frames_averaged = history.size();
  }
  record.warmup = record.frames_averaged < config.n_avg;

  record.measurement = disambiguate(record.peaks, wp, config.solver);
  if (const auto sigmas = predicted_beat_sigmas(config, record.peaks, record.measurement)) {
    record.measurement = disambiguate(record.peaks, wp, config.solver, sigmas);
  }
  ++state.next_cycle;
  return record;
}

// ---------------------------------------------------------------------------

SyntheticSource::SyntheticSource(WorkingPoint wp, SyntheticOptions options)
    : wp_(wp), ramps_(build_cycle(wp)), options_(std::move(options)) {
  if (options_.forced_blind_ramp && *options_.forced_blind_ramp > 3) {
    throw ParameterError("forced_blind_ramp must be 0..3");
  }
}

std::optional<SyntheticCycle> SyntheticSource::next_cycle() {
  if (cycle_ >= options_.n_cycles) return std::nullopt;
  SyntheticCycle out;
  out.cycle_index = cycle_;
  out.truth = options_.trajectory ? options_.trajectory(cycle_) : options_.target;
  const GroundTruth truth = options_.target_present ? out.truth : GroundTruth{};
  for (std::size_t i = 0; i < 4; ++i) {
    const bool silent = !options_.target_present || options_.forced_blind_ramp == i;
    out.seeds[i] = frame_seed(options_.seed, cycle_, i);
    out.frames[i] = synthesize_frame(wp_, ramps_[i], truth, silent ? 0.0 : options_.amplitude,
                                     options_.noise_sigma, out.seeds[i]);
    // ADC words are 32-bit floats.
    for (double& s : out.frames[i].samples) s = static_cast<double>(static_cast<float>(s));
  }
  ++cycle_;
  return out;
}

std::vector<double> SyntheticSource::flatten(const SyntheticCycle& cycle) {
  std::vector<double> samples;
  for (const auto& f : cycle.frames) samples.insert(samples.end(), f.samples.begin(), f.samples.end());
  return samples;
}

std::optional<std::vector<double>> SyntheticSource::next() {
  auto c = next_cycle();
  if (!c) return std::nullopt;
  return flatten(*c);
}

struct ReplaySource::Impl {
  std::ifstream in;
  std::size_t samples_per_cycle = 0;
};

ReplaySource::ReplaySource(const std::string& raw_path, std::size_t samples_per_cycle,
                           std::size_t sync_offset_samples)
    : impl_(std::make_unique<Impl>()) {
  impl_->in.open(raw_path, std::ios::binary);
  if (!impl_->in) throw FormatError("cannot open frame file '" + raw_path + "'");
  impl_->samples_per_cycle = samples_per_cycle;
  std::error_code ec;
  const auto size = std::filesystem::file_size(raw_path, ec);
  const auto offset = sync_offset_samples * sizeof(float);
  if (ec || offset > size) throw FramingError("sync offset lies beyond the end of '" + raw_path + "'");
  impl_->in.seekg(static_cast<std::streamoff>(offset));
}

ReplaySource::~ReplaySource() = default;

std::optional<std::vector<double>> ReplaySource::next() {
  const std::size_t n = impl_->samples_per_cycle;
  std::vector<unsigned char> bytes(n * 4);
  impl_->in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  const auto got = static_cast<std::size_t>(impl_->in.gcount());
  if (got == 0) return std::nullopt;
  if (got != bytes.size()) throw FramingError("frame file ends inside a cycle");
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* b = bytes.data() + 4 * i;
    const std::uint32_t word = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    samples[i] = static_cast<double>(std::bit_cast<float>(word));
  }
  return samples;
}

RecordStream::RecordStream(CycleSource& source, PipelineConfig config, CalibrationSet calibration)
    : source_(&source), config_(std::move(config)), calibration_(std::move(calibration)), state_(config_.n_avg) {
  validate(config_);
  calibration_.check_compatible(config_.working_point, config_.fft_bins);
}

std::optional<CycleRecord> RecordStream::next() {
  auto samples = source_->next();
  if (!samples) return std::nullopt;
  return process_cycle(*samples, state_, config_, calibration_);
}

RecordStream run_stream(CycleSource& source, const PipelineConfig& config, const CalibrationSet& calibration) {
  return RecordStream(source, config, calibration);
}

std::vector<CycleRecord> run_all(CycleSource& source, const PipelineConfig& config,
                                 const CalibrationSet& calibration) {
  auto stream = run_stream(source, config, calibration);
  std::vector<CycleRecord> out;
  while (auto r = stream.next()) out.push_back(std::move(*r));
  return out;
}

CalibrationSet capture_calibration(CycleSource& source, const WorkingPoint& wp, std::size_t fft_bins,
                                   std::uint64_t n_cycles) {
  std::vector<CycleFrames> cycles;
  while (cycles.size() < n_cycles) {
    auto samples = source.next();
    if (!samples) break;
    cycles.push_back(slice_cycle(*samples, wp));
  }
  return calibrate_cycles(cycles, wp, fft_bins);
}

}  // namespace lfi
