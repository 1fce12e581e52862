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

#include "doorledger/acl.h"

#include "absl/strings/str_cat.h"

namespace doorledger::acl {

std::string_view ActionName(Action a) {
  switch (a) {
    case Action::kCreate:
      return "Create";
    case Action::kRead:
      return "Read";
    case Action::kUpdate:
      return "Update";
    case Action::kDelete:
      return "Delete";
  }
  return "Read";
}

absl::StatusOr<Action> ParseAction(std::string_view name) {
  if (name == "Create") return Action::kCreate;
  if (name == "Read") return Action::kRead;
  if (name == "Update") return Action::kUpdate;
  if (name == "Delete") return Action::kDelete;
  return absl::InvalidArgumentError(absl::StrCat("unknown action: ", std::string(name)));
}

std::string_view OperationName(Operation op) {
  return op == Operation::kAllow ? "Allow" : "Deny";
}

absl::StatusOr<Operation> ParseOperation(std::string_view name) {
  if (name == "Allow") return Operation::kAllow;
  if (name == "Deny") return Operation::kDeny;
  return absl::InvalidArgumentError(absl::StrCat("unknown operation: ", std::string(name)));
}

bool PatternMatches(std::string_view pattern, const PhysicalPlace& place) {
  if (pattern == "*") return true;
  if (pattern.starts_with("dept:") && pattern.ends_with(":*") &&
      pattern.size() > 7) {
    std::string_view dept = pattern.substr(5, pattern.size() - 7);
    return dept == place.department_id;
  }
  return pattern == place.place_id;
}

bool ConditionHolds(const Condition& condition, const AccessRequest& request) {
  switch (condition.kind) {
    case Condition::Kind::kAlways:
      return true;
    case Condition::Kind::kTimeWindow: {
      int m = MinuteOfDay(request.at_time);
      if (condition.start_minute <= condition.end_minute) {
        return m >= condition.start_minute && m < condition.end_minute;
      }
      return m >= condition.start_minute || m < condition.end_minute;
    }
    case Condition::Kind::kDepartmentMatch:
      return request.participant.department_id.has_value() &&
             *request.participant.department_id == request.place.department_id;
  }
  return false;
}

bool MatchRule(const AclRule& rule, const AccessRequest& request) {
  return rule.roles.contains(request.participant.role) &&
         PatternMatches(rule.resource_pattern, request.place) &&
         rule.actions.contains(request.action) &&
         ConditionHolds(rule.condition, request);
}

Decision DecideStatic(std::span<const AclRule> rules,
                      const AccessRequest& request) {
  for (const AclRule& rule : rules) {
    if (MatchRule(rule, request)) {
      return Decision::Static(rule.operation, rule.rule_id);
    }
  }
  return Decision::DefaultDeny();
}

Decision DecideEffective(std::span<const AclRule> rules,
                         std::span<const DynamicEntry> overlay,
                         const AccessRequest& request) {
  if (request.action == Action::kRead) {
    const DynamicEntry* latest = nullptr;
    for (const DynamicEntry& e : overlay) {
      if (e.participant_id != request.participant.participant_id ||
          e.place_id != request.place.place_id) {
        continue;
      }
      if (latest == nullptr || e.seq > latest->seq) latest = &e;
    }
    if (latest != nullptr) {
      return Decision::Dynamic(latest->effect == Effect::kGrant
                                   ? Operation::kAllow
                                   : Operation::kDeny,
                               latest->seq);
    }
  }
  return DecideStatic(rules, request);
}

absl::Status ValidateRule(const AclRule& rule) {
  if (rule.rule_id.empty()) return absl::InvalidArgumentError("empty ruleId");
  if (rule.roles.empty() || rule.actions.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("rule ", rule.rule_id, ": roles and actions must be set"));
  }
  if (rule.resource_pattern.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("rule ", rule.rule_id, ": empty resourcePattern"));
  }
  if (rule.condition.kind == Condition::Kind::kTimeWindow) {
    auto in_range = [](int m) { return m >= 0 && m < 1440; };
    if (!in_range(rule.condition.start_minute) ||
        !in_range(rule.condition.end_minute)) {
      return absl::InvalidArgumentError(
          absl::StrCat("rule ", rule.rule_id, ": minutes outside [0, 1440)"));
    }
  }
  return absl::OkStatus();
}

Json ToJson(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::kAlways:
      return {{"kind", "Always"}};
    case Condition::Kind::kTimeWindow:
      return {{"kind", "TimeWindow"},
              {"startMinuteOfDay", c.start_minute},
              {"endMinuteOfDay", c.end_minute}};
    case Condition::Kind::kDepartmentMatch:
      return {{"kind", "DepartmentMatch"}};
  }
  return {};
}

Json ToJson(const AclRule& rule) {
  Json roles = Json::array();
  for (Role r : rule.roles) roles.push_back(RoleName(r));
  Json actions = Json::array();
  for (Action a : rule.actions) actions.push_back(ActionName(a));
  return {{"ruleId", rule.rule_id},
          {"roles", roles},
          {"resourcePattern", rule.resource_pattern},
          {"actions", actions},
          {"operation", OperationName(rule.operation)},
          {"condition", ToJson(rule.condition)}};
}

Json ToJson(const Decision& d) {
  Json source;
  switch (d.source) {
    case Decision::Source::kStatic:
      source = {{"kind", "Static"}, {"ruleId", d.rule_id}};
      break;
    case Decision::Source::kDynamic:
      source = {{"kind", "Dynamic"}, {"seq", d.seq}};
      break;
    case Decision::Source::kDefaultDeny:
      source = {{"kind", "DefaultDeny"}};
      break;
  }
  return {{"outcome", OperationName(d.outcome)}, {"source", source}};
}

Json ToJson(const DynamicEntry& e) {
  return {{"participantId", e.participant_id},
          {"placeId", e.place_id},
          {"effect", e.effect == Effect::kGrant ? "Grant" : "Revoke"},
          {"seq", e.seq},
          {"grantedBy", e.granted_by}};
}

absl::StatusOr<Condition> ConditionFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("condition object");
  std::string kind = j.value("kind", "");
  if (kind == "Always") return Condition::Always();
  if (kind == "DepartmentMatch") return Condition::DepartmentMatch();
  if (kind == "TimeWindow") {
    auto s = j.find("startMinuteOfDay");
    auto e = j.find("endMinuteOfDay");
    if (s == j.end() || e == j.end() || !s->is_number_integer() ||
        !e->is_number_integer()) {
      return absl::InvalidArgumentError("TimeWindow needs integer minutes");
    }
    return Condition::TimeWindow(s->get<int>(), e->get<int>());
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown condition: ", kind));
}

absl::StatusOr<AclRule> RuleFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("rule object");
  AclRule rule;
  rule.rule_id = j.value("ruleId", "");
  rule.resource_pattern = j.value("resourcePattern", "");
  for (const Json& r : j.value("roles", Json::array())) {
    if (!r.is_string()) return absl::InvalidArgumentError("role string");
    auto role = ParseRole(r.get<std::string>());
    if (!role.ok()) return role.status();
    rule.roles.insert(*role);
  }
  for (const Json& a : j.value("actions", Json::array())) {
    if (!a.is_string()) return absl::InvalidArgumentError("action string");
    auto action = ParseAction(a.get<std::string>());
    if (!action.ok()) return action.status();
    rule.actions.insert(*action);
  }
  auto op = ParseOperation(j.value("operation", ""));
  if (!op.ok()) return op.status();
  rule.operation = *op;
  auto cond = ConditionFromJson(j.value("condition", Json{{"kind", "Always"}}));
  if (!cond.ok()) return cond.status();
  rule.condition = *cond;
  if (auto st = ValidateRule(rule); !st.ok()) return st;
  return rule;
}

absl::StatusOr<Decision> DecisionFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("decision object");
  auto op = ParseOperation(j.value("outcome", ""));
  if (!op.ok()) return op.status();
  Json source = j.value("source", Json::object());
  std::string kind = source.value("kind", "");
  if (kind == "Static") {
    return Decision::Static(*op, source.value("ruleId", ""));
  }
  if (kind == "Dynamic") {
    return Decision::Dynamic(*op, source.value("seq", uint64_t{0}));
  }
  if (kind == "DefaultDeny") return Decision::DefaultDeny();
  return absl::InvalidArgumentError("unknown decision source");
}

absl::StatusOr<DynamicEntry> DynamicEntryFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("entry object");
  DynamicEntry e;
  e.participant_id = j.value("participantId", "");
  e.place_id = j.value("placeId", "");
  std::string effect = j.value("effect", "");
  if (effect == "Grant") {
    e.effect = Effect::kGrant;
  } else if (effect == "Revoke") {
    e.effect = Effect::kRevoke;
  } else {
    return absl::InvalidArgumentError("unknown effect");
  }
  e.seq = j.value("seq", uint64_t{0});
  e.granted_by = j.value("grantedBy", "");
  return e;
}

absl::StatusOr<std::vector<AclRule>> RulesFromJson(const Json& j) {
  if (!j.is_array()) return absl::InvalidArgumentError("rule set must be array");
  std::vector<AclRule> rules;
  std::set<std::string> seen;
  for (const Json& item : j) {
    auto rule = RuleFromJson(item);
    if (!rule.ok()) return rule.status();
    if (!seen.insert(rule->rule_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate ruleId: ", rule->rule_id));
    }
    rules.push_back(*std::move(rule));
  }
  return rules;
}

absl::StatusOr<std::vector<AclRule>> LoadRuleFile(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto j = ParseJson(*text);
  if (!j.ok()) return j.status();
  return RulesFromJson(*j);
}

}  // namespace doorledger::acl
