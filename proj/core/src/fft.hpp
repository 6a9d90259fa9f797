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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lfi::detail {

/// Forward real-to-complex DFT of `input` zero-padded to `n` points; returns
/// the n/2 + 1 non-negative frequency bins. Safe to call concurrently.
std::vector<std::complex<double>> real_fft(std::span<const double> input, std::size_t n);

}  // namespace lfi::detail
