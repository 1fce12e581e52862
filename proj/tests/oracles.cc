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

#include "oracles.h"

#include <algorithm>
#include <ctime>

namespace doorledger::oracle {
namespace {

using acl::AclRule;
using acl::AccessRequest;
using acl::Condition;
using acl::Decision;

bool PlaceInPattern(const std::string& pattern, const PhysicalPlace& place) {
  if (pattern == "*") return true;
  const std::string prefix = "dept:";
  const std::string suffix = ":*";
  if (pattern.size() > prefix.size() + suffix.size() &&
      pattern.compare(0, prefix.size(), prefix) == 0 &&
      pattern.compare(pattern.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return pattern.substr(prefix.size(),
                          pattern.size() - prefix.size() - suffix.size()) ==
           place.department_id;
  }
  return pattern == place.place_id;
}

int UtcMinute(Timestamp t) {
  std::time_t secs = static_cast<std::time_t>(ToMillis(t) / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return tm.tm_hour * 60 + tm.tm_min;
}

bool ConditionMet(const Condition& c, const AccessRequest& r) {
  if (c.kind == Condition::Kind::kDepartmentMatch) {
    return r.participant.department_id == std::optional(r.place.department_id);
  }
  if (c.kind == Condition::Kind::kTimeWindow) {
    int m = UtcMinute(r.at_time);
    bool inside_plain = c.start_minute <= m && m < c.end_minute;
    bool inside_wrapped = m >= c.start_minute || m < c.end_minute;
    return c.start_minute <= c.end_minute ? inside_plain : inside_wrapped;
  }
  return true;
}

}  // namespace

std::string Render(const Decision& d) {
  std::string out = d.outcome == acl::Operation::kAllow ? "Allow/" : "Deny/";
  switch (d.source) {
    case Decision::Source::kStatic: return out + "Static/" + d.rule_id;
    case Decision::Source::kDynamic: return out + "Dynamic/" + std::to_string(d.seq);
    case Decision::Source::kDefaultDeny: return out + "DefaultDeny";
  }
  return out;
}

Decision FirstMatch(const std::vector<AclRule>& rules, const AccessRequest& r) {
  std::vector<const AclRule*> matching;
  for (const AclRule& rule : rules) {
    bool role = std::find(rule.roles.begin(), rule.roles.end(), r.participant.role) !=
                rule.roles.end();
    bool action =
        std::find(rule.actions.begin(), rule.actions.end(), r.action) != rule.actions.end();
    if (role && action && PlaceInPattern(rule.resource_pattern, r.place) &&
        ConditionMet(rule.condition, r)) {
      matching.push_back(&rule);
    }
  }
  if (matching.empty()) return Decision{};
  Decision d;
  d.outcome = matching.front()->operation;
  d.source = Decision::Source::kStatic;
  d.rule_id = matching.front()->rule_id;
  return d;
}

Decision SortTakeLast(const std::vector<AclRule>& rules,
                      std::vector<acl::DynamicEntry> overlay, const AccessRequest& r) {
  if (r.action == acl::Action::kRead) {
    std::erase_if(overlay, [&](const acl::DynamicEntry& e) {
      return e.participant_id != r.participant.participant_id ||
             e.place_id != r.place.place_id;
    });
    std::sort(overlay.begin(), overlay.end(),
              [](const auto& a, const auto& b) { return a.seq < b.seq; });
    if (!overlay.empty()) {
      Decision d;
      d.outcome = overlay.back().effect == acl::Effect::kGrant ? acl::Operation::kAllow
                                                               : acl::Operation::kDeny;
      d.source = Decision::Source::kDynamic;
      d.seq = overlay.back().seq;
      return d;
    }
  }
  return FirstMatch(rules, r);
}

void SerialLedger::ApplyGenesis(const Block& genesis) {
  for (uint32_t i = 0; i < genesis.transactions.size(); ++i) {
    for (const auto& w : genesis.transactions[i].result.rwset.writes) {
      if (w.value) {
        cells[w.key] = {*w.value, 0, i};
      } else {
        cells.erase(w.key);
      }
    }
  }
}

std::vector<bool> SerialLedger::ApplyBlock(const Block& block) {
  std::vector<bool> flags;
  const uint64_t height = block.header.height;
  for (uint32_t i = 0; i < block.transactions.size(); ++i) {
    const auto& rwset = block.transactions[i].result.rwset;
    bool ok = true;
    for (const auto& read : rwset.reads) {
      auto it = cells.find(read.key);
      if (!read.version) {
        ok = ok && it == cells.end();
      } else {
        ok = ok && it != cells.end() && it->second.block == read.version->block &&
             it->second.tx == read.version->tx;
      }
    }
    flags.push_back(ok);
    if (!ok) continue;
    for (const auto& w : rwset.writes) {
      if (w.value) {
        cells[w.key] = {*w.value, height, i};
      } else {
        cells.erase(w.key);
      }
    }
  }
  return flags;
}

int AlertsFor(const std::string& decisions, int k) {
  int alerts = 0;
  int run = 0;
  for (char c : decisions) {
    if (c == 'A') {
      run = 0;
      continue;
    }
    if (++run >= k) {
      ++alerts;
      run = 0;
    }
  }
  return alerts;
}

}  // namespace doorledger::oracle
