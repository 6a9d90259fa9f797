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

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "lfi/analysis.hpp"
#include "lfi/errors.hpp"
#include "lfi/io.hpp"
#include "lfi/keyvalue.hpp"
#include "lfi/pipeline.hpp"

#ifndef LFI_VERSION
#define LFI_VERSION "unknown"
#endif

namespace lfi::cli {
namespace {

using json = nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

struct SourceOptions {
  std::uint64_t cycles = 100;
  double distance_m = 0.05;
  double velocity_mps = 0.0;
  double amplitude = 1.0;
  double noise_sigma = 0.0;
  bool no_target = false;
  int blind_ramp = -1;
  std::string replay;
};

std::string fixed(double v, int precision) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return ec == std::errc{} ? std::string(buf, end) : format_double(v);
}

PipelineConfig load_config(const Globals& g) {
  if (g.config.empty()) return PipelineConfig{};
  return pipeline_config_from(KeyValueFile::load(g.config));
}

json config_snapshot(const PipelineConfig& cfg) {
  const auto kv = to_key_value(cfg);
  json j = json::object();
  for (const auto& [k, v] : kv.entries()) j[k] = v;
  return j;
}

SyntheticOptions synthetic_options(const SourceOptions& s, const Globals& g) {
  SyntheticOptions o;
  o.target = {s.distance_m, s.velocity_mps};
  o.amplitude = s.amplitude;
  o.noise_sigma = s.noise_sigma;
  o.seed = g.seed;
  o.n_cycles = s.cycles;
  o.target_present = !s.no_target;
  if (s.blind_ramp >= 0) o.forced_blind_ramp = static_cast<std::size_t>(s.blind_ramp);
  return o;
}

json input_provenance(const SourceOptions& s, const Globals& g) {
  if (!s.replay.empty()) return json{{"kind", "replay"}, {"path", s.replay}};
  json j{{"kind", "synthetic"},
         {"seed", g.seed},
         {"cycles", s.cycles},
         {"target_present", !s.no_target},
         {"distance_m", s.distance_m},
         {"velocity_mps", s.velocity_mps},
         {"amplitude", s.amplitude},
         {"noise_sigma", s.noise_sigma}};
  if (s.blind_ramp >= 0) j["forced_blind_ramp"] = s.blind_ramp;
  return j;
}

void write_manifest(const std::string& output, const std::string& command, const PipelineConfig& cfg,
                    const json& input, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "lfi";
  m["version"] = LFI_VERSION;
  m["command"] = command;
  m["config"] = config_snapshot(cfg);
  m["input"] = input;
  m["outputs"] = outputs;
  write_file_atomic(output + ".manifest.json", m.dump(2) + "\n");
}

// Refuses replays whose sidecar describes a different acquisition.
void check_replay_sidecar(const std::string& raw, const WorkingPoint& wp) {
  const std::string sidecar = raw + ".json";
  if (!std::filesystem::exists(sidecar)) return;
  const auto meta = load_frame_sidecar(sidecar);
  if (!(meta.working_point == wp)) {
    throw ParameterError("working point in '" + sidecar + "' does not match the configuration");
  }
}

std::unique_ptr<CycleSource> make_source(const SourceOptions& s, const Globals& g, const PipelineConfig& cfg) {
  if (!s.replay.empty()) {
    check_replay_sidecar(s.replay, cfg.working_point);
    return std::make_unique<ReplaySource>(s.replay, cfg.working_point.samples_per_cycle(), cfg.sync_offset_samples);
  }
  return std::make_unique<SyntheticSource>(cfg.working_point, synthetic_options(s, g));
}

void add_source_options(CLI::App* cmd, SourceOptions& s, bool with_target) {
  cmd->add_option("--cycles", s.cycles, "Number of cycles to synthesize")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", s.noise_sigma, "Additive noise sigma per sample")->check(CLI::NonNegativeNumber);
  cmd->add_option("--amplitude", s.amplitude, "Beat amplitude")->check(CLI::NonNegativeNumber);
  if (with_target) {
    cmd->add_option("--distance", s.distance_m, "Target distance (m)");
    cmd->add_option("--velocity", s.velocity_mps, "Target velocity (m/s)");
    cmd->add_flag("--no-target", s.no_target, "Synthesize noise only");
    cmd->add_option("--blind-ramp", s.blind_ramp, "Silence one ramp (0-3)")->check(CLI::Range(0, 3));
  }
}

std::string status_text(const CycleRecord& r) {
  return r.warmup ? "warmup" : std::string(to_string(r.measurement.status));
}

constexpr std::string_view kRecordHeader =
    "cycle,t_s,R_m,v_mps,sigma_R_m,sigma_v_mps,status,spread,"
    "f_b0_hz,f_b1_hz,f_b2_hz,f_b3_hz,intensity0,intensity1,intensity2,intensity3";

void write_record_csv(std::ostream& out, const CycleRecord& r) {
  const auto& m = r.measurement;
  out << r.cycle_index << ',' << format_double(r.timestamp_s) << ',' << format_double(m.distance_m) << ','
      << format_double(m.velocity_mps) << ',' << format_double(m.sigma_distance_m) << ','
      << format_double(m.sigma_velocity_mps) << ',' << status_text(r) << ',' << format_double(m.cluster_spread);
  for (const auto& p : r.peaks) out << ',' << format_double(p.valid ? p.beat_frequency_hz : std::nan(""));
  for (const auto& p : r.peaks) out << ',' << format_double(p.intensity);
  out << '\n';
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_record_jsonl(std::ostream& out, const CycleRecord& r) {
  const auto& m = r.measurement;
  json j;
  j["cycle"] = r.cycle_index;
  j["t_s"] = r.timestamp_s;
  j["R_m"] = nullable(m.distance_m);
  j["v_mps"] = nullable(m.velocity_mps);
  j["sigma_R_m"] = nullable(m.sigma_distance_m);
  j["sigma_v_mps"] = nullable(m.sigma_velocity_mps);
  j["status"] = status_text(r);
  j["spread"] = nullable(m.cluster_spread);
  j["frames_averaged"] = r.frames_averaged;
  json fb = json::array(), in = json::array(), valid = json::array();
  for (const auto& p : r.peaks) {
    fb.push_back(p.valid ? nullable(p.beat_frequency_hz) : json(nullptr));
    in.push_back(nullable(p.intensity));
    valid.push_back(p.valid);
  }
  j["f_b_hz"] = fb;
  j["intensity"] = in;
  j["valid"] = valid;
  j["selected_ramps"] = m.selected_ramps;
  j["sign_combo"] = m.sign_combo;
  out << j.dump() << '\n';
}

// Writes to --out atomically with a manifest, or to stdout without one.
void emit(const Globals& g, std::ostream& out, const std::string& contents, const std::string& command,
          const PipelineConfig& cfg, const json& input) {
  if (g.out.empty()) {
    out << contents;
    return;
  }
  write_file_atomic(g.out, contents);
  write_manifest(g.out, command, cfg, input, {g.out});
}

int cmd_synth(const Globals& g, const SourceOptions& s, std::ostream& out) {
  if (g.out.empty()) throw ParameterError("synth needs --out for the raw frame file");
  const auto cfg = load_config(g);
  const auto opts = synthetic_options(s, g);
  SyntheticSource src(cfg.working_point, opts);
  const std::string sidecar = g.out + ".json";
  const std::string tmp = g.out + ".tmp";
  {
    FrameExportWriter writer(tmp, sidecar, cfg.working_point, opts);
    while (auto c = src.next_cycle()) writer.append(*c);
    writer.finish();
  }
  std::filesystem::rename(tmp, g.out);
  write_manifest(g.out, "synth", cfg, input_provenance(s, g), {g.out, sidecar});
  out << "wrote " << s.cycles << " cycles (" << s.cycles * cfg.working_point.samples_per_cycle()
      << " float32 samples) to " << g.out << '\n';
  return 0;
}

int cmd_calibrate(const Globals& g, const SourceOptions& s, std::ostream& out) {
  if (g.out.empty()) throw ParameterError("calibrate needs --out for the calibration file");
  const auto cfg = load_config(g);
  SourceOptions quiet = s;
  quiet.no_target = true;
  auto src = make_source(quiet, g, cfg);
  const auto cal = capture_calibration(*src, cfg.working_point, cfg.fft_bins, s.cycles);
  save_calibration(g.out, cal);
  write_manifest(g.out, "calibrate", cfg, input_provenance(quiet, g), {g.out});
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = cal.ramps[i];
    double mean = 0.0, sigma = 0.0;
    for (std::size_t k = 0; k < r.reference_mean.size(); ++k) {
      mean += r.reference_mean[k];
      sigma += r.reference_sigma[k];
    }
    const double n = double(r.reference_mean.size());
    out << "ramp " << i << ": mean floor " << format_double(mean / n) << ", mean sigma " << format_double(sigma / n)
        << " over " << r.n_frames_used << " frames\n";
  }
  return 0;
}

int cmd_process(const Globals& g, const SourceOptions& s, const std::string& calibration_path, std::ostream& out) {
  const auto cfg = load_config(g);
  const auto cal = calibration_path.empty() ? CalibrationSet::zero(cfg.working_point, cfg.fft_bins)
                                            : load_calibration(calibration_path);
  cal.check_compatible(cfg.working_point, cfg.fft_bins);
  auto src = make_source(s, g, cfg);
  auto stream = run_stream(*src, cfg, cal);
  std::ostringstream body;
  const bool jsonl = g.format == "jsonl";
  if (!jsonl) body << kRecordHeader << '\n';
  std::size_t rows = 0;
  while (auto r = stream.next()) {
    jsonl ? write_record_jsonl(body, *r) : write_record_csv(body, *r);
    ++rows;
  }
  json input = input_provenance(s, g);
  if (!calibration_path.empty()) input["calibration"] = calibration_path;
  emit(g, out, body.str(), "process", cfg, input);
  if (!g.out.empty()) out << "wrote " << rows << " records to " << g.out << '\n';
  return 0;
}

struct BlindMapOptions {
  AxisRange v{-0.1, 0.1, 201};
  AxisRange r{0.0, 0.1, 201};
  bool grid = false;
};

int cmd_blindmap(const Globals& g, const BlindMapOptions& o, std::ostream& out) {
  const auto cfg = load_config(g);
  const auto map = blind_map(cfg.working_point, o.v, o.r);
  std::ostringstream body;
  o.grid ? write_blind_map_grid(body, map) : write_blind_map_csv(body, map);
  const json input{{"kind", "grid"},
                   {"v_min_mps", o.v.min}, {"v_max_mps", o.v.max}, {"v_points", o.v.points},
                   {"r_min_m", o.r.min}, {"r_max_m", o.r.max}, {"r_points", o.r.points},
                   {"layout", o.grid ? "grid" : "csv"}};
  emit(g, out, body.str(), "blindmap", cfg, input);
  if (!g.out.empty()) {
    std::size_t multi = 0;
    for (auto c : map.blind_count) multi += c >= 2;
    out << "cells with two or more blind ramps: " << multi << " of " << map.blind_count.size() << '\n';
  }
  return 0;
}

int cmd_mindist(const Globals& g, double v_max, double search_max, std::ostream& out) {
  const auto cfg = load_config(g);
  const auto r = min_reliable_distance(cfg.working_point, v_max, search_max);
  if (r) {
    out << "minimum reliable distance: " << fixed(*r * 1e3, 3) << " mm (|v| <= " << format_double(v_max)
        << " m/s, hp cutoff " << format_double(cfg.working_point.hp_cutoff_hz) << " Hz)\n";
  } else {
    out << "minimum reliable distance: none up to " << fixed(search_max * 1e3, 3) << " mm\n";
  }
  if (!g.out.empty()) {
    std::string body = "hp_cutoff_hz,v_max_mps,search_max_m,min_distance_m\n";
    body += format_double(cfg.working_point.hp_cutoff_hz) + ',' + format_double(v_max) + ',' +
            format_double(search_max) + ',' + (r ? format_double(*r) : std::string("nan")) + '\n';
    write_file_atomic(g.out, body);
    write_manifest(g.out, "mindist", cfg, json{{"kind", "analysis"}, {"v_max_mps", v_max}, {"search_max_m", search_max}},
                   {g.out});
  }
  return 0;
}

int cmd_fitnoise(const Globals& g, const std::string& input, std::ostream& out) {
  const auto cfg = load_config(g);
  std::ifstream in(input);
  if (!in) throw FormatError("cannot open '" + input + "'");
  const auto obs = read_noise_observations(in);
  const auto c = fit_noise_model(obs);
  out << "fitted " << c.n_observations << " observations, log10 residual rms " << format_double(c.fit_residual) << '\n';
  for (std::size_t i = 0; i < 5; ++i) {
    out << "  a" << i + 1 << " (" << kNoiseRegressorNames[i] << ") = " << format_double(c.slopes[i]) << " +- "
        << format_double(c.standard_errors[i]) << '\n';
  }
  out << "  b = " << format_double(c.intercept) << " +- " << format_double(c.standard_errors[5]) << '\n';
  if (!g.out.empty()) {
    std::ostringstream body;
    write_noise_model(body, c);
    write_file_atomic(g.out, body.str());
    write_manifest(g.out, "fitnoise", cfg, json{{"kind", "observations"}, {"path", input}}, {g.out});
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-ramp laser feedback interferometry sensing tools", "lfi"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", LFI_VERSION);

  Globals g;
  app.add_option("--config", g.config, "Key-value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for synthetic sources");
  app.add_option("--out", g.out, "Output path");
  app.add_option("--format", g.format, "Record format")->check(CLI::IsMember({"csv", "jsonl"}));

  SourceOptions synth_src;
  auto* synth = app.add_subcommand("synth", "Export synthetic ADC frames (float32 + JSON sidecar)");
  add_source_options(synth, synth_src, true);

  SourceOptions cal_src;
  cal_src.cycles = 256;
  cal_src.noise_sigma = 0.05;
  auto* calibrate = app.add_subcommand("calibrate", "Capture a noise-floor calibration from no-target cycles");
  add_source_options(calibrate, cal_src, false);
  calibrate->add_option("--replay", cal_src.replay, "Raw float32 frame file instead of synthetic cycles")
      ->check(CLI::ExistingFile);

  SourceOptions proc_src;
  std::string calibration_path;
  auto* process = app.add_subcommand("process", "Run the measurement pipeline and write per-cycle records");
  add_source_options(process, proc_src, true);
  process->add_option("--replay", proc_src.replay, "Raw float32 frame file instead of synthetic cycles")
      ->check(CLI::ExistingFile);
  process->add_option("--calibration", calibration_path, "Calibration file (zero floor when omitted)")
      ->check(CLI::ExistingFile);

  BlindMapOptions bm;
  auto* blindmap = app.add_subcommand("blindmap", "Count blind ramps over a (v, R) grid");
  blindmap->add_option("--v-min", bm.v.min, "Lowest velocity (m/s)");
  blindmap->add_option("--v-max", bm.v.max, "Highest velocity (m/s)");
  blindmap->add_option("--v-points", bm.v.points, "Velocity grid points");
  blindmap->add_option("--r-min", bm.r.min, "Lowest distance (m)");
  blindmap->add_option("--r-max", bm.r.max, "Highest distance (m)");
  blindmap->add_option("--r-points", bm.r.points, "Distance grid points");
  blindmap->add_flag("--grid", bm.grid, "Dense matrix layout instead of long CSV");

  double v_max = 0.1, search_max = kDefaultMinDistanceSearchMax;
  auto* mindist = app.add_subcommand("mindist", "Minimum distance with at most one blind ramp");
  mindist->add_option("--v-max", v_max, "Largest |v| to cover (m/s)")->check(CLI::PositiveNumber);
  mindist->add_option("--search-max", search_max, "Upper end of the search (m)")->check(CLI::PositiveNumber);

  std::string observations;
  auto* fitnoise = app.add_subcommand("fitnoise", "Fit the log-log beat-noise model");
  fitnoise->add_option("--input", observations, "Observation CSV")->required()->check(CLI::ExistingFile);

  std::vector<std::string> argv_store{"lfi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*synth) return cmd_synth(g, synth_src, out);
    if (*calibrate) return cmd_calibrate(g, cal_src, out);
    if (*process) return cmd_process(g, proc_src, calibration_path, out);
    if (*blindmap) return cmd_blindmap(g, bm, out);
    if (*mindist) return cmd_mindist(g, v_max, search_max, out);
    if (*fitnoise) return cmd_fitnoise(g, observations, out);
  } catch (const Error& e) {
    err << "lfi: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "lfi: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace lfi::cli
