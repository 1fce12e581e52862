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

#include "doorledger/chaincode.h"

#include <map>
#include <initializer_list>

#include "absl/strings/str_cat.h"

namespace doorledger::chaincode {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Records every key read (with the version observed) and buffers writes.
class TxContext {
 public:
  explicit TxContext(const StateView& view) : view_(view) {}

  std::optional<Json> Get(const std::string& key) {
    auto vv = GetVersioned(key);
    if (!vv) return std::nullopt;
    auto j = ParseJson(vv->value);
    if (!j.ok()) return std::nullopt;
    return *std::move(j);
  }

  std::optional<VersionedValue> GetVersioned(const std::string& key) {
    auto vv = view_.Read(key);
    reads_.try_emplace(key, vv ? std::optional<Version>(vv->version)
                               : std::nullopt);
    return vv;
  }

  void Put(const std::string& key, const Json& value) {
    writes_[key] = CanonicalJson(value);
  }
  void Delete(const std::string& key) { writes_[key] = std::nullopt; }

  ReadWriteSet TakeRwset() {
    ReadWriteSet out;
    for (auto& [k, v] : reads_) out.reads.push_back({k, v});
    for (auto& [k, v] : writes_) out.writes.push_back({k, v});
    return out;
  }

 private:
  const StateView& view_;
  std::map<std::string, std::optional<Version>> reads_;
  std::map<std::string, std::optional<std::string>> writes_;
};

class Executor {
 public:
  Executor(const Submission& submission, const StateView& view,
           const ChainConfig& config)
      : sub_(submission), ctx_(view), config_(config) {}

  ExecutionResult Run(const TransactionPayload& payload) {
    if (!LoadSubmitter()) return Finish();
    std::visit(
        Overloaded{
            [&](const RegisterParticipant& p) { DoRegisterParticipant(p); },
            [&](const RegisterPlace& p) { DoRegisterPlace(p); },
            [&](const RegisterDepartment& p) { DoRegisterDepartment(p); },
            [&](const GrantAccess& p) {
              DoChangeAccess(p.target_participant_id, p.place_id,
                             acl::Effect::kGrant);
            },
            [&](const RevokeAccess& p) {
              DoChangeAccess(p.target_participant_id, p.place_id,
                             acl::Effect::kRevoke);
            },
            [&](const DelegateAuthority& p) {
              DoDelegation(p.delegate_participant_id, p.department_id, true);
            },
            [&](const RevokeDelegation& p) {
              DoDelegation(p.delegate_participant_id, p.department_id, false);
            },
            [&](const CheckAccess& p) { DoCheckAccess(p); },
            [&](const RevokeCard& p) { DoRevokeCard(p); },
            [&](const UnknownPayload& p) {
              Fail(AppError::kUnknownTransactionType,
                   absl::StrCat("unknown transaction type: ", p.type));
            },
        },
        payload);
    return Finish();
  }

 private:
  bool LoadSubmitter() {
    auto revoked = ctx_.Get(keys::RevokedCard(sub_.card.card_id));
    auto record = ctx_.Get(keys::Participant(sub_.card.participant_id));
    if (revoked) {
      Fail(AppError::kUnauthorized, "card revoked");
      return false;
    }
    if (!record) {
      Fail(AppError::kUnauthorized, "submitter is not a registered participant");
      return false;
    }
    auto p = ParticipantFromJson(*record);
    if (!p.ok()) {
      Fail(AppError::kUnauthorized, "submitter record unreadable");
      return false;
    }
    submitter_ = *std::move(p);
    return true;
  }

  bool IsAdmin() const { return submitter_.role == Role::kAdmin; }

  bool IsCeoOf(const Department& dept) const {
    return submitter_.role == Role::kCeo &&
           dept.ceo_participant_id == submitter_.participant_id;
  }

  void Fail(AppError code, std::string message) {
    result_.response = {code, std::move(message)};
  }

  void Emit(EventKind kind, std::string participant,
            std::optional<std::string> place, std::string detail,
            uint32_t count = 0) {
    result_.events.push_back({kind, std::move(participant), std::move(place),
                              std::move(detail), sub_.tx_id, count});
  }

  std::optional<Department> LoadDepartment(const std::string& id) {
    auto j = ctx_.Get(keys::Department(id));
    if (!j) return std::nullopt;
    auto d = DepartmentFromJson(*j);
    if (!d.ok()) return std::nullopt;
    return *std::move(d);
  }

  std::optional<PhysicalPlace> LoadPlace(const std::string& id) {
    auto j = ctx_.Get(keys::Place(id));
    if (!j) return std::nullopt;
    auto p = PlaceFromJson(*j);
    if (!p.ok()) return std::nullopt;
    return *std::move(p);
  }

  std::optional<Participant> LoadParticipant(const std::string& id) {
    auto j = ctx_.Get(keys::Participant(id));
    if (!j) return std::nullopt;
    auto p = ParticipantFromJson(*j);
    if (!p.ok()) return std::nullopt;
    return *std::move(p);
  }

  bool RequireAdmin() {
    if (IsAdmin()) return true;
    Fail(AppError::kUnauthorized, "Admin role required");
    return false;
  }

  void DoRegisterParticipant(const RegisterParticipant& tx) {
    if (!RequireAdmin()) return;
    if (auto st = ValidateParticipant(tx.participant); !st.ok()) {
      return Fail(AppError::kInvalidArgument, std::string(st.message()));
    }
    const std::string key = keys::Participant(tx.participant.participant_id);
    if (ctx_.GetVersioned(key)) {
      return Fail(AppError::kAlreadyExists,
                  absl::StrCat("participant exists: ",
                               tx.participant.participant_id));
    }
    ctx_.Put(key, ToJson(tx.participant));
  }

  void DoRegisterPlace(const RegisterPlace& tx) {
    if (!RequireAdmin()) return;
    if (tx.place.place_id.empty()) {
      return Fail(AppError::kInvalidArgument, "empty placeId");
    }
    const std::string key = keys::Place(tx.place.place_id);
    if (ctx_.GetVersioned(key)) {
      return Fail(AppError::kAlreadyExists,
                  absl::StrCat("place exists: ", tx.place.place_id));
    }
    if (!LoadDepartment(tx.place.department_id)) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown department: ", tx.place.department_id));
    }
    ctx_.Put(key, ToJson(tx.place));
  }

  void DoRegisterDepartment(const RegisterDepartment& tx) {
    if (!RequireAdmin()) return;
    const Department& d = tx.department;
    if (d.department_id.empty()) {
      return Fail(AppError::kInvalidArgument, "empty departmentId");
    }
    const std::string key = keys::Department(d.department_id);
    if (ctx_.GetVersioned(key)) {
      return Fail(AppError::kAlreadyExists,
                  absl::StrCat("department exists: ", d.department_id));
    }
    auto ceo = LoadParticipant(d.ceo_participant_id);
    if (!ceo) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown CEO: ", d.ceo_participant_id));
    }
    if (ceo->role != Role::kCeo || ceo->department_id != d.department_id) {
      return Fail(AppError::kInvalidArgument,
                  absl::StrCat(d.ceo_participant_id,
                               " is not a CEO of ", d.department_id));
    }
    ctx_.Put(key, ToJson(d));
  }

  void DoRevokeCard(const RevokeCard& tx) {
    if (!RequireAdmin()) return;
    if (tx.card_id.empty()) {
      return Fail(AppError::kInvalidArgument, "empty cardId");
    }
    const std::string key = keys::RevokedCard(tx.card_id);
    if (ctx_.GetVersioned(key)) {
      return Fail(AppError::kAlreadyExists,
                  absl::StrCat("card already revoked: ", tx.card_id));
    }
    ctx_.Put(key, {{"cardId", tx.card_id},
                   {"revokedBy", submitter_.participant_id}});
  }

  void DoChangeAccess(const std::string& target, const std::string& place_id,
                      acl::Effect effect) {
    auto place = LoadPlace(place_id);
    if (!place) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown place: ", place_id));
    }
    auto dept = LoadDepartment(place->department_id);
    bool authorized = IsAdmin() || (dept && IsCeoOf(*dept));
    if (!authorized) {
      authorized = ctx_.GetVersioned(keys::Delegation(
                       submitter_.participant_id, place->department_id))
                       .has_value();
    }
    if (!authorized) {
      return Fail(AppError::kUnauthorized,
                  absl::StrCat(submitter_.participant_id,
                               " may not change access in ",
                               place->department_id));
    }
    if (!LoadParticipant(target)) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown participant: ", target));
    }
    const std::string key = keys::Dynamic(target, place_id);
    ctx_.GetVersioned(key);
    const char* effect_name =
        effect == acl::Effect::kGrant ? "Grant" : "Revoke";
    // seq is not stored: it is derived from the key version at commit.
    ctx_.Put(key, {{"participantId", target},
                   {"placeId", place_id},
                   {"effect", effect_name},
                   {"grantedBy", submitter_.participant_id}});
    Emit(EventKind::kAccessGrantChanged, target, place_id, effect_name);
  }

  void DoDelegation(const std::string& delegate, const std::string& dept_id,
                    bool grant) {
    auto dept = LoadDepartment(dept_id);
    if (!dept) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown department: ", dept_id));
    }
    if (!IsAdmin() && !IsCeoOf(*dept)) {
      return Fail(AppError::kUnauthorized,
                  absl::StrCat(submitter_.participant_id,
                               " may not delegate in ", dept_id));
    }
    if (!LoadParticipant(delegate)) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown participant: ", delegate));
    }
    const std::string key = keys::Delegation(delegate, dept_id);
    bool active = ctx_.GetVersioned(key).has_value();
    if (grant) {
      ctx_.Put(key, {{"delegateParticipantId", delegate},
                     {"departmentId", dept_id},
                     {"grantedBy", submitter_.participant_id}});
    } else {
      if (!active) {
        return Fail(AppError::kNotFound,
                    absl::StrCat("no delegation for ", delegate, " in ",
                                 dept_id));
      }
      ctx_.Delete(key);
    }
    result_.events.push_back({EventKind::kDelegationChanged, delegate,
                              std::nullopt,
                              absl::StrCat(grant ? "Delegate " : "Revoke ",
                                           dept_id),
                              sub_.tx_id, 0});
  }

  void DoCheckAccess(const CheckAccess& tx) {
    auto place = LoadPlace(tx.place_id);
    if (!place) {
      return Fail(AppError::kNotFound,
                  absl::StrCat("unknown place: ", tx.place_id));
    }
    const std::string& who = submitter_.participant_id;
    std::vector<acl::DynamicEntry> overlay;
    if (auto vv = ctx_.GetVersioned(keys::Dynamic(who, tx.place_id))) {
      auto j = ParseJson(vv->value);
      if (j.ok()) {
        auto entry = acl::DynamicEntryFromJson(*j);
        if (entry.ok()) {
          entry->seq = SeqForVersion(vv->version, config_.max_block_size);
          overlay.push_back(*std::move(entry));
        }
      }
    }
    acl::AccessRequest request{submitter_, *place, acl::Action::kRead,
                               sub_.proposed_at};
    acl::Decision decision =
        acl::DecideEffective(config_.rules, overlay, request);
    result_.decision = decision;

    const std::string counter_key = keys::Denials(who, tx.place_id);
    uint64_t count = 0;
    if (auto j = ctx_.Get(counter_key)) count = j->value("count", uint64_t{0});

    if (decision.outcome == acl::Operation::kAllow) {
      ctx_.Put(counter_key, {{"count", 0}});
      Emit(EventKind::kAccessGranted, who, tx.place_id,
           CanonicalJson(acl::ToJson(decision)));
      return;
    }
    ++count;
    Emit(EventKind::kAccessDenied, who, tx.place_id,
         CanonicalJson(acl::ToJson(decision)));
    if (count >= config_.intrusion_threshold) {
      Emit(EventKind::kIntrusionAlert, who, tx.place_id,
           absl::StrCat(count, " consecutive denials"),
           static_cast<uint32_t>(count));
      count = 0;
    }
    ctx_.Put(counter_key, {{"count", count}});
  }

  ExecutionResult Finish() {
    result_.rwset = ctx_.TakeRwset();
    if (!result_.response.ok()) {
      result_.rwset.writes.clear();
      result_.events.clear();
      result_.decision.reset();
    }
    return std::move(result_);
  }

  const Submission& sub_;
  TxContext ctx_;
  const ChainConfig& config_;
  Participant submitter_;
  ExecutionResult result_;
};

}  // namespace

namespace keys {
namespace {
std::string Join(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (std::string_view p : parts) out.append(p);
  return out;
}
}  // namespace

std::string Participant(std::string_view id) {
  return Join({"participant/", id});
}
std::string Place(std::string_view id) { return Join({"place/", id}); }
std::string Department(std::string_view id) { return Join({"dept/", id}); }
std::string RevokedCard(std::string_view card_id) {
  return Join({"revokedCard/", card_id});
}
std::string Dynamic(std::string_view participant_id,
                    std::string_view place_id) {
  return Join({"dyn/", participant_id, "/", place_id});
}
std::string Delegation(std::string_view participant_id,
                       std::string_view department_id) {
  return Join({"deleg/", participant_id, "/", department_id});
}
std::string Denials(std::string_view participant_id,
                    std::string_view place_id) {
  return Join({"denials/", participant_id, "/", place_id});
}
}  // namespace keys

uint64_t SeqForVersion(Version version, uint32_t max_block_size) {
  return version.block * max_block_size + version.tx;
}

std::string PayloadTypeName(const TransactionPayload& payload) {
  return std::visit(
      Overloaded{
          [](const RegisterParticipant&) -> std::string {
            return "RegisterParticipant";
          },
          [](const RegisterPlace&) -> std::string { return "RegisterPlace"; },
          [](const RegisterDepartment&) -> std::string {
            return "RegisterDepartment";
          },
          [](const GrantAccess&) -> std::string { return "GrantAccess"; },
          [](const RevokeAccess&) -> std::string { return "RevokeAccess"; },
          [](const DelegateAuthority&) -> std::string {
            return "DelegateAuthority";
          },
          [](const RevokeDelegation&) -> std::string {
            return "RevokeDelegation";
          },
          [](const CheckAccess&) -> std::string { return "CheckAccess"; },
          [](const RevokeCard&) -> std::string { return "RevokeCard"; },
          [](const UnknownPayload& p) -> std::string { return p.type; },
      },
      payload);
}

Json ToJson(const TransactionPayload& payload) {
  Json j = std::visit(
      Overloaded{
          [](const RegisterParticipant& p) -> Json {
            return {{"participant", doorledger::ToJson(p.participant)}};
          },
          [](const RegisterPlace& p) -> Json {
            return {{"place", doorledger::ToJson(p.place)}};
          },
          [](const RegisterDepartment& p) -> Json {
            return {{"department", doorledger::ToJson(p.department)}};
          },
          [](const GrantAccess& p) -> Json {
            return {{"targetParticipantId", p.target_participant_id},
                    {"placeId", p.place_id}};
          },
          [](const RevokeAccess& p) -> Json {
            return {{"targetParticipantId", p.target_participant_id},
                    {"placeId", p.place_id}};
          },
          [](const DelegateAuthority& p) -> Json {
            return {{"delegateParticipantId", p.delegate_participant_id},
                    {"departmentId", p.department_id}};
          },
          [](const RevokeDelegation& p) -> Json {
            return {{"delegateParticipantId", p.delegate_participant_id},
                    {"departmentId", p.department_id}};
          },
          [](const CheckAccess& p) -> Json { return {{"placeId", p.place_id}}; },
          [](const RevokeCard& p) -> Json { return {{"cardId", p.card_id}}; },
          [](const UnknownPayload& p) -> Json {
            return p.body.is_object() ? p.body : Json::object();
          },
      },
      payload);
  j["type"] = PayloadTypeName(payload);
  return j;
}

absl::StatusOr<TransactionPayload> PayloadFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("payload object");
  const std::string type = j.value("type", "");
  auto str = [&](const char* field) -> absl::StatusOr<std::string> {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat(type, ": missing field '", field, "'"));
    }
    return it->get<std::string>();
  };
  auto pair = [&](const char* a, const char* b)
      -> absl::StatusOr<std::pair<std::string, std::string>> {
    auto x = str(a);
    if (!x.ok()) return x.status();
    auto y = str(b);
    if (!y.ok()) return y.status();
    return std::make_pair(*x, *y);
  };

  if (type == "RegisterParticipant") {
    auto p = ParticipantFromJson(j.value("participant", Json()));
    if (!p.ok()) return p.status();
    return RegisterParticipant{*std::move(p)};
  }
  if (type == "RegisterPlace") {
    auto p = PlaceFromJson(j.value("place", Json()));
    if (!p.ok()) return p.status();
    return RegisterPlace{*std::move(p)};
  }
  if (type == "RegisterDepartment") {
    auto d = DepartmentFromJson(j.value("department", Json()));
    if (!d.ok()) return d.status();
    return RegisterDepartment{*std::move(d)};
  }
  if (type == "GrantAccess" || type == "RevokeAccess") {
    auto p = pair("targetParticipantId", "placeId");
    if (!p.ok()) return p.status();
    if (type == "GrantAccess") return GrantAccess{p->first, p->second};
    return RevokeAccess{p->first, p->second};
  }
  if (type == "DelegateAuthority" || type == "RevokeDelegation") {
    auto p = pair("delegateParticipantId", "departmentId");
    if (!p.ok()) return p.status();
    if (type == "DelegateAuthority") {
      return DelegateAuthority{p->first, p->second};
    }
    return RevokeDelegation{p->first, p->second};
  }
  if (type == "CheckAccess") {
    auto p = str("placeId");
    if (!p.ok()) return p.status();
    return CheckAccess{*p};
  }
  if (type == "RevokeCard") {
    auto c = str("cardId");
    if (!c.ok()) return c.status();
    return RevokeCard{*c};
  }
  if (type.empty()) return absl::InvalidArgumentError("payload without type");
  Json body = j;
  body.erase("type");
  return UnknownPayload{type, body};
}

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kAccessGranted:
      return "AccessGranted";
    case EventKind::kAccessDenied:
      return "AccessDenied";
    case EventKind::kAccessGrantChanged:
      return "AccessGrantChanged";
    case EventKind::kDelegationChanged:
      return "DelegationChanged";
    case EventKind::kIntrusionAlert:
      return "IntrusionAlert";
  }
  return "AccessGranted";
}

absl::StatusOr<EventKind> ParseEventKind(std::string_view name) {
  for (EventKind k :
       {EventKind::kAccessGranted, EventKind::kAccessDenied,
        EventKind::kAccessGrantChanged, EventKind::kDelegationChanged,
        EventKind::kIntrusionAlert}) {
    if (EventKindName(k) == name) return k;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown event kind: ", std::string(name)));
}

std::string_view AppErrorName(AppError e) {
  switch (e) {
    case AppError::kOk:
      return "Ok";
    case AppError::kNotFound:
      return "NotFound";
    case AppError::kUnauthorized:
      return "Unauthorized";
    case AppError::kAlreadyExists:
      return "AlreadyExists";
    case AppError::kInvalidArgument:
      return "InvalidArgument";
    case AppError::kUnknownTransactionType:
      return "UnknownTransactionType";
  }
  return "Ok";
}

void Encode(Encoder& enc, const ReadWriteSet& rwset) {
  enc.U32(static_cast<uint32_t>(rwset.reads.size()));
  for (const KeyRead& r : rwset.reads) {
    enc.Str(r.key).Bool(r.version.has_value());
    if (r.version) enc.U64(r.version->block).U32(r.version->tx);
  }
  enc.U32(static_cast<uint32_t>(rwset.writes.size()));
  for (const KeyWrite& w : rwset.writes) {
    enc.Str(w.key).Bool(w.value.has_value());
    if (w.value) enc.Str(*w.value);
  }
}

ReadWriteSet DecodeReadWriteSet(Decoder& dec) {
  ReadWriteSet rwset;
  uint32_t n = dec.U32();
  for (uint32_t i = 0; i < n; ++i) {
    KeyRead r;
    r.key = dec.Str();
    if (dec.Bool()) {
      Version v;
      v.block = dec.U64();
      v.tx = dec.U32();
      r.version = v;
    }
    rwset.reads.push_back(std::move(r));
  }
  n = dec.U32();
  for (uint32_t i = 0; i < n; ++i) {
    KeyWrite w;
    w.key = dec.Str();
    if (dec.Bool()) w.value = dec.Str();
    rwset.writes.push_back(std::move(w));
  }
  return rwset;
}

void Encode(Encoder& enc, const ChainEvent& event) {
  enc.U8(static_cast<uint8_t>(event.kind))
      .Str(event.participant_id)
      .Bool(event.place_id.has_value());
  if (event.place_id) enc.Str(*event.place_id);
  enc.Str(event.detail).Str(event.tx_id).U32(event.count);
}

ChainEvent DecodeEvent(Decoder& dec) {
  ChainEvent e;
  uint8_t kind = dec.U8();
  if (kind > static_cast<uint8_t>(EventKind::kIntrusionAlert)) {
    throw DecodeError("bad event kind");
  }
  e.kind = static_cast<EventKind>(kind);
  e.participant_id = dec.Str();
  if (dec.Bool()) e.place_id = dec.Str();
  e.detail = dec.Str();
  e.tx_id = dec.Str();
  e.count = dec.U32();
  return e;
}

void Encode(Encoder& enc, const ExecutionResult& result) {
  Encode(enc, result.rwset);
  enc.U32(static_cast<uint32_t>(result.events.size()));
  for (const ChainEvent& e : result.events) Encode(enc, e);
  enc.U8(static_cast<uint8_t>(result.response.code))
      .Str(result.response.message)
      .Bool(result.decision.has_value());
  if (result.decision) enc.Str(CanonicalJson(acl::ToJson(*result.decision)));
}

ExecutionResult DecodeExecutionResult(Decoder& dec) {
  ExecutionResult r;
  r.rwset = DecodeReadWriteSet(dec);
  uint32_t n = dec.U32();
  for (uint32_t i = 0; i < n; ++i) r.events.push_back(DecodeEvent(dec));
  uint8_t code = dec.U8();
  if (code > static_cast<uint8_t>(AppError::kUnknownTransactionType)) {
    throw DecodeError("bad response code");
  }
  r.response.code = static_cast<AppError>(code);
  r.response.message = dec.Str();
  if (dec.Bool()) {
    auto j = ParseJson(dec.Str());
    if (!j.ok()) throw DecodeError("bad decision json");
    auto d = acl::DecisionFromJson(*j);
    if (!d.ok()) throw DecodeError("bad decision");
    r.decision = *d;
  }
  return r;
}

Bytes ResultBytes(const ExecutionResult& result) {
  Encoder enc;
  Encode(enc, result);
  return std::move(enc).bytes();
}

Json ToJson(const ChainEvent& event) {
  Json j = {{"kind", EventKindName(event.kind)},
            {"participantId", event.participant_id},
            {"detail", event.detail},
            {"txId", event.tx_id}};
  if (event.place_id) j["placeId"] = *event.place_id;
  if (event.kind == EventKind::kIntrusionAlert) j["count"] = event.count;
  return j;
}

ExecutionResult Execute(const Submission& submission,
                        const TransactionPayload& payload,
                        const StateView& view, const ChainConfig& config) {
  return Executor(submission, view, config).Run(payload);
}

}  // namespace doorledger::chaincode
