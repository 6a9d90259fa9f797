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

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "lfi/modulation.hpp"
#include "lfi/pipeline.hpp"
#include "lfi/spectral.hpp"

namespace lfi {

inline constexpr int kCalibrationFormatVersion = 1;
inline constexpr int kFrameFormatVersion = 1;

void save_calibration(const std::string& path, const CalibrationSet& calibration);
/// Throws FormatError on malformed or wrong-version files.
[[nodiscard]] CalibrationSet load_calibration(const std::string& path);

/// Metadata describing an exported frame file.
struct FrameSidecar {
  WorkingPoint working_point;
  std::uint64_t n_cycles = 0;
  std::uint64_t samples_per_ramp = 0;
  std::uint64_t seed = 0;
  double amplitude = 0.0;
  double noise_sigma = 0.0;
  bool target_present = true;

  struct Frame {
    std::uint64_t cycle = 0;
    RampDescriptor ramp;
    std::uint64_t seed = 0;
    GroundTruth truth;
    double true_signed_beat_hz = 0.0;
    bool blind = false;
  };
  std::vector<Frame> frames;
};

[[nodiscard]] FrameSidecar load_frame_sidecar(const std::string& path);

/// Streams synthetic cycles into a raw little-endian float32 file and writes
/// the JSON sidecar on finish().
class FrameExportWriter {
 public:
  FrameExportWriter(std::string raw_path, std::string sidecar_path, const WorkingPoint& wp,
                    const SyntheticOptions& options);

  void append(const SyntheticCycle& cycle);
  void finish();

 private:
  std::string raw_path_;
  std::string sidecar_path_;
  std::ofstream raw_;
  FrameSidecar meta_;
};

/// Appends little-endian float32 samples.
void write_f32le(std::ostream& out, const std::vector<double>& samples);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace lfi
