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

#ifndef DOORLEDGER_STATE_H_
#define DOORLEDGER_STATE_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "doorledger/common.h"
#include "doorledger/crypto.h"

namespace doorledger {

// (blockHeight, txOffset) of the last committed write to a key.
struct Version {
  uint64_t block = 0;
  uint32_t tx = 0;

  friend auto operator<=>(const Version&, const Version&) = default;
};

struct VersionedValue {
  std::string value;  // canonical JSON
  Version version;

  friend bool operator==(const VersionedValue&, const VersionedValue&) = default;
};

using StateEntry = std::pair<std::string, VersionedValue>;

// Read-only snapshot interface handed to chaincode.
class StateView {
 public:
  virtual ~StateView() = default;
  virtual std::optional<VersionedValue> Read(std::string_view key) const = 0;
  // Entries whose key starts with prefix, in key order.
  virtual std::vector<StateEntry> RangeRead(std::string_view prefix) const = 0;
};

class WorldState final : public StateView {
 public:
  std::optional<VersionedValue> Read(std::string_view key) const override;
  std::vector<StateEntry> RangeRead(std::string_view prefix) const override;

  // nullopt value deletes the key.
  void Apply(const std::string& key, const std::optional<std::string>& value,
             Version version);

  size_t size() const { return entries_.size(); }
  const std::map<std::string, VersionedValue, std::less<>>& entries() const {
    return entries_;
  }

  // SHA-256 over the key-sorted (key, value, version) sequence.
  Hash32 Hash() const;

  Json ToSnapshotJson() const;
  static absl::StatusOr<WorldState> FromSnapshotJson(const Json& j);

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::map<std::string, VersionedValue, std::less<>> entries_;
};

}  // namespace doorledger

#endif  // DOORLEDGER_STATE_H_
