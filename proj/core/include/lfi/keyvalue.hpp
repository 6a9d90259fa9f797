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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lfi {

/// Locale-independent shortest round-trip text for a double ("nan", "inf" for
/// non-finite values).
[[nodiscard]] std::string format_double(double value);

[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] std::int64_t parse_int(std::string_view text);

/// A flat `key = value` text file. Blank lines and lines starting with '#' are
/// ignored; duplicate keys are an error.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  [[nodiscard]] bool contains(std::string_view key) const;
  [[nodiscard]] const std::string& get(std::string_view key) const;
  [[nodiscard]] std::optional<std::string> find(std::string_view key) const;

  [[nodiscard]] double get_double(std::string_view key) const;
  [[nodiscard]] double get_double(std::string_view key, double fallback) const;
  [[nodiscard]] std::int64_t get_int(std::string_view key, std::int64_t fallback) const;

  void set(std::string key, std::string value);

  /// Throws FormatError for the first key not present in `allowed`.
  void reject_unknown(std::span<const std::string_view> allowed) const;

  [[nodiscard]] const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace lfi
