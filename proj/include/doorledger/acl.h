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

// Access decisions: an ordered static rule list (first match wins, default
// deny) plus a dynamic per-(participant, place) overlay of grant/revoke
// entries where the latest entry wins. Both decide functions are pure.

#ifndef DOORLEDGER_ACL_H_
#define DOORLEDGER_ACL_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/common.h"
#include "doorledger/domain.h"

namespace doorledger::acl {

// Physical entry through a door is kRead.
enum class Action { kCreate, kRead, kUpdate, kDelete };
enum class Operation { kAllow, kDeny };

std::string_view ActionName(Action a);
absl::StatusOr<Action> ParseAction(std::string_view name);
std::string_view OperationName(Operation op);
absl::StatusOr<Operation> ParseOperation(std::string_view name);

struct Condition {
  enum class Kind { kAlways, kTimeWindow, kDepartmentMatch };
  Kind kind = Kind::kAlways;
  // kTimeWindow only. Minutes in [0, 1440); start > end wraps midnight.
  int start_minute = 0;
  int end_minute = 0;

  static Condition Always() { return {}; }
  static Condition TimeWindow(int start, int end) {
    return {Kind::kTimeWindow, start, end};
  }
  static Condition DepartmentMatch() { return {Kind::kDepartmentMatch, 0, 0}; }

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct AclRule {
  std::string rule_id;
  std::set<Role> roles;
  // Exact placeId, "dept:<departmentId>:*", or "*".
  std::string resource_pattern;
  std::set<Action> actions;
  Operation operation = Operation::kDeny;
  Condition condition;

  friend bool operator==(const AclRule&, const AclRule&) = default;
};

struct AccessRequest {
  Participant participant;
  PhysicalPlace place;
  Action action = Action::kRead;
  Timestamp at_time;
};

enum class Effect { kGrant, kRevoke };

struct DynamicEntry {
  std::string participant_id;
  std::string place_id;
  Effect effect = Effect::kGrant;
  uint64_t seq = 0;
  std::string granted_by;

  friend bool operator==(const DynamicEntry&, const DynamicEntry&) = default;
};

struct Decision {
  enum class Source { kStatic, kDynamic, kDefaultDeny };
  Operation outcome = Operation::kDeny;
  Source source = Source::kDefaultDeny;
  std::string rule_id;  // kStatic
  uint64_t seq = 0;     // kDynamic

  static Decision DefaultDeny() { return {}; }
  static Decision Static(Operation op, std::string rule_id) {
    return {op, Source::kStatic, std::move(rule_id), 0};
  }
  static Decision Dynamic(Operation op, uint64_t seq) {
    return {op, Source::kDynamic, "", seq};
  }

  friend bool operator==(const Decision&, const Decision&) = default;
};

bool PatternMatches(std::string_view pattern, const PhysicalPlace& place);
bool ConditionHolds(const Condition& condition, const AccessRequest& request);

bool MatchRule(const AclRule& rule, const AccessRequest& request);

Decision DecideStatic(std::span<const AclRule> rules,
                      const AccessRequest& request);

// Overlay entries must carry distinct seq values. Only kRead consults the
// overlay; other actions fall through to DecideStatic.
Decision DecideEffective(std::span<const AclRule> rules,
                         std::span<const DynamicEntry> overlay,
                         const AccessRequest& request);

absl::Status ValidateRule(const AclRule& rule);

Json ToJson(const Condition& c);
Json ToJson(const AclRule& rule);
Json ToJson(const Decision& d);
Json ToJson(const DynamicEntry& e);
absl::StatusOr<Condition> ConditionFromJson(const Json& j);
absl::StatusOr<AclRule> RuleFromJson(const Json& j);
absl::StatusOr<Decision> DecisionFromJson(const Json& j);
absl::StatusOr<DynamicEntry> DynamicEntryFromJson(const Json& j);

// A JSON array of rules.
absl::StatusOr<std::vector<AclRule>> RulesFromJson(const Json& j);
absl::StatusOr<std::vector<AclRule>> LoadRuleFile(const std::string& path);

}  // namespace doorledger::acl

#endif  // DOORLEDGER_ACL_H_
