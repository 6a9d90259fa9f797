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

#include <stdexcept>
#include <string>

namespace lfi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented invariant or precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Sample buffers or spectra whose length/shape does not match what is expected.
class FramingError : public Error {
 public:
  using Error::Error;
};

/// A beat frequency at or above Nyquist cannot be synthesized without aliasing.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Not enough (or inconsistent) data to build or apply a calibration profile.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Two ramps with identical slope cannot be solved as a pair.
class DegeneratePairError : public Error {
 public:
  using Error::Error;
};

/// Least-squares problems that cannot be solved (rank deficiency, bad domain).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or data files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lfi
