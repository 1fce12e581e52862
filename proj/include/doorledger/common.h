// Copyright 2026 The doorledger Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOORLEDGER_COMMON_H_
#define DOORLEDGER_COMMON_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace doorledger {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;
using Json = nlohmann::json;

// UTC, millisecond resolution. Every timestamp that ends up in a hash is
// carried at this resolution so peers agree bit for bit.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp Now();
Timestamp FromMillis(int64_t millis);
int64_t ToMillis(Timestamp t);

// RFC 3339 with millisecond fraction and a trailing 'Z'.
std::string FormatRfc3339(Timestamp t);
// Accepts "YYYY-MM-DDTHH:MM:SS[.fff]Z" and "+00:00" offsets.
absl::StatusOr<Timestamp> ParseRfc3339(std::string_view text);

// Minute of the UTC day, in [0, 1440).
int MinuteOfDay(Timestamp t);

std::string ToHex(ByteView bytes);
absl::StatusOr<Bytes> FromHex(std::string_view hex);
std::string ToBase64(ByteView bytes);
absl::StatusOr<Bytes> FromBase64(std::string_view text);

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}
inline std::string AsString(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Sorted keys, no insignificant whitespace.
std::string CanonicalJson(const Json& value);

absl::StatusOr<Json> ParseJson(std::string_view text);

// Reads a whole file; NotFound when it cannot be opened.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

}  // namespace doorledger

#endif  // DOORLEDGER_COMMON_H_
