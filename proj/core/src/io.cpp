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

#include "lfi/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "lfi/errors.hpp"

namespace lfi {
namespace {

using Json = nlohmann::ordered_json;

Json to_json(const WorkingPoint& wp) {
  return Json{{"ramp_duration_s", wp.ramp_duration_s},
              {"steep_slope_hz_per_s", wp.steep_slope_hz_per_s},
              {"ratio_rt", wp.ratio_rt},
              {"emitted_frequency_hz", wp.emitted_frequency_hz},
              {"hp_cutoff_hz", wp.hp_cutoff_hz},
              {"sampling_rate_hz", wp.sampling_rate_hz}};
}

WorkingPoint working_point_from(const nlohmann::json& j) {
  WorkingPoint wp;
  wp.ramp_duration_s = j.at("ramp_duration_s").get<double>();
  wp.steep_slope_hz_per_s = j.at("steep_slope_hz_per_s").get<double>();
  wp.ratio_rt = j.at("ratio_rt").get<double>();
  wp.emitted_frequency_hz = j.at("emitted_frequency_hz").get<double>();
  wp.hp_cutoff_hz = j.at("hp_cutoff_hz").get<double>();
  wp.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
  return wp;
}

nlohmann::json parse_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + std::string(what) + " '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + " '" + path + "': " + e.what());
  }
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp + "'");
    out << contents;
    if (!out.flush()) throw FormatError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void save_calibration(const std::string& path, const CalibrationSet& calibration) {
  Json j;
  j["format"] = "lfi-calibration";
  j["version"] = kCalibrationFormatVersion;
  j["n_bins"] = calibration.n_bins;
  j["sampling_rate_hz"] = calibration.sampling_rate_hz;
  j["samples_per_ramp"] = calibration.samples_per_ramp;
  Json ramps = Json::array();
  for (const auto& r : calibration.ramps) {
    ramps.push_back(Json{{"n_frames_used", r.n_frames_used},
                         {"reference_mean", r.reference_mean},
                         {"reference_sigma", r.reference_sigma}});
  }
  j["ramps"] = std::move(ramps);
  write_file_atomic(path, j.dump() + "\n");
}

CalibrationSet load_calibration(const std::string& path) {
  const auto j = parse_file(path, "calibration file");
  try {
    if (j.at("format") != "lfi-calibration") throw FormatError("'" + path + "' is not a calibration file");
    if (j.at("version").get<int>() != kCalibrationFormatVersion) {
      throw FormatError("unsupported calibration version in '" + path + "'");
    }
    CalibrationSet set;
    set.n_bins = j.at("n_bins").get<std::size_t>();
    set.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    set.samples_per_ramp = j.at("samples_per_ramp").get<std::size_t>();
    const auto& ramps = j.at("ramps");
    if (ramps.size() != 4) throw FormatError("calibration must hold 4 ramp profiles");
    for (std::size_t i = 0; i < 4; ++i) {
      auto& r = set.ramps[i];
      r.n_frames_used = ramps[i].at("n_frames_used").get<std::size_t>();
      r.reference_mean = ramps[i].at("reference_mean").get<std::vector<double>>();
      r.reference_sigma = ramps[i].at("reference_sigma").get<std::vector<double>>();
      if (r.reference_mean.size() != set.n_bins / 2 || r.reference_sigma.size() != set.n_bins / 2) {
        throw FormatError("calibration profile length does not match n_bins");
      }
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("calibration file '" + path + "': " + e.what());
  }
}

void write_f32le(std::ostream& out, const std::vector<double>& samples) {
  std::string bytes(samples.size() * 4, '\0');
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(samples[i]));
    for (int b = 0; b < 4; ++b) bytes[4 * i + static_cast<std::size_t>(b)] = static_cast<char>((word >> (8 * b)) & 0xFF);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

FrameExportWriter::FrameExportWriter(std::string raw_path, std::string sidecar_path, const WorkingPoint& wp,
                                     const SyntheticOptions& options)
    : raw_path_(std::move(raw_path)), sidecar_path_(std::move(sidecar_path)) {
  raw_.open(raw_path_, std::ios::binary | std::ios::trunc);
  if (!raw_) throw FormatError("cannot write '" + raw_path_ + "'");
  meta_.working_point = wp;
  meta_.samples_per_ramp = wp.samples_per_ramp();
  meta_.seed = options.seed;
  meta_.amplitude = options.amplitude;
  meta_.noise_sigma = options.noise_sigma;
  meta_.target_present = options.target_present;
}

void FrameExportWriter::append(const SyntheticCycle& cycle) {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& f = cycle.frames[i];
    write_f32le(raw_, f.samples);
    meta_.frames.push_back({cycle.cycle_index, f.ramp, cycle.seeds[i], cycle.truth, f.true_signed_beat_hz, f.blind});
  }
  ++meta_.n_cycles;
}

void FrameExportWriter::finish() {
  raw_.close();
  if (!raw_) throw FormatError("failed writing '" + raw_path_ + "'");
  Json j;
  j["format"] = "lfi-frames";
  j["version"] = kFrameFormatVersion;
  j["sample_format"] = "float32le";
  j["working_point"] = to_json(meta_.working_point);
  j["n_cycles"] = meta_.n_cycles;
  j["samples_per_ramp"] = meta_.samples_per_ramp;
  j["seed"] = meta_.seed;
  j["amplitude"] = meta_.amplitude;
  j["noise_sigma"] = meta_.noise_sigma;
  j["target_present"] = meta_.target_present;
  Json frames = Json::array();
  for (const auto& f : meta_.frames) {
    frames.push_back(Json{{"cycle", f.cycle},
                          {"ramp_index", f.ramp.index},
                          {"slope_hz_per_s", f.ramp.slope_hz_per_s},
                          {"start_time_s", f.ramp.start_time_s},
                          {"duration_s", f.ramp.duration_s},
                          {"seed", f.seed},
                          {"distance_m", f.truth.distance_m},
                          {"velocity_mps", f.truth.velocity_mps},
                          {"true_signed_beat_hz", f.true_signed_beat_hz},
                          {"blind", f.blind}});
  }
  j["frames"] = std::move(frames);
  write_file_atomic(sidecar_path_, j.dump(1) + "\n");
}

FrameSidecar load_frame_sidecar(const std::string& path) {
  const auto j = parse_file(path, "frame sidecar");
  try {
    if (j.at("format") != "lfi-frames") throw FormatError("'" + path + "' is not a frame sidecar");
    if (j.at("version").get<int>() != kFrameFormatVersion) throw FormatError("unsupported frame sidecar version");
    if (j.at("sample_format") != "float32le") throw FormatError("unsupported sample format");
    FrameSidecar s;
    s.working_point = working_point_from(j.at("working_point"));
    s.n_cycles = j.at("n_cycles").get<std::uint64_t>();
    s.samples_per_ramp = j.at("samples_per_ramp").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.amplitude = j.at("amplitude").get<double>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.target_present = j.at("target_present").get<bool>();
    for (const auto& f : j.at("frames")) {
      FrameSidecar::Frame fr;
      fr.cycle = f.at("cycle").get<std::uint64_t>();
      fr.ramp = RampDescriptor{f.at("ramp_index").get<std::size_t>(), f.at("slope_hz_per_s").get<double>(),
                               f.at("start_time_s").get<double>(), f.at("duration_s").get<double>()};
      fr.seed = f.at("seed").get<std::uint64_t>();
      fr.truth = GroundTruth{f.at("distance_m").get<double>(), f.at("velocity_mps").get<double>()};
      fr.true_signed_beat_hz = f.at("true_signed_beat_hz").get<double>();
      fr.blind = f.at("blind").get<bool>();
      s.frames.push_back(fr);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("frame sidecar '" + path + "': " + e.what());
  }
}

}  // namespace lfi
