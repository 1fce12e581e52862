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

#include "doorledger/state.h"

#include "doorledger/codec.h"

namespace doorledger {

std::optional<VersionedValue> WorldState::Read(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<StateEntry> WorldState::RangeRead(std::string_view prefix) const {
  std::vector<StateEntry> out;
  for (auto it = entries_.lower_bound(prefix);
       it != entries_.end() && it->first.starts_with(prefix); ++it) {
    out.emplace_back(it->first, it->second);
  }
  return out;
}

void WorldState::Apply(const std::string& key,
                       const std::optional<std::string>& value,
                       Version version) {
  if (value.has_value()) {
    entries_[key] = VersionedValue{*value, version};
  } else {
    entries_.erase(key);
  }
}

Hash32 WorldState::Hash() const {
  Encoder enc;
  for (const auto& [key, vv] : entries_) {
    enc.Str(key).Str(vv.value).U64(vv.version.block).U32(vv.version.tx);
  }
  return Sha256(enc.bytes());
}

Json WorldState::ToSnapshotJson() const {
  Json entries = Json::array();
  for (const auto& [key, vv] : entries_) {
    entries.push_back({{"key", key},
                       {"value", vv.value},
                       {"block", vv.version.block},
                       {"tx", vv.version.tx}});
  }
  return entries;
}

absl::StatusOr<WorldState> WorldState::FromSnapshotJson(const Json& j) {
  if (!j.is_array()) return absl::InvalidArgumentError("snapshot array");
  WorldState state;
  for (const Json& e : j) {
    if (!e.is_object() || !e.contains("key") || !e.contains("value")) {
      return absl::InvalidArgumentError("snapshot entry");
    }
    state.entries_[e["key"].get<std::string>()] = VersionedValue{
        e["value"].get<std::string>(),
        Version{e.value("block", uint64_t{0}), e.value("tx", uint32_t{0})}};
  }
  return state;
}

}  // namespace doorledger
