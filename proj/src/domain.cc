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

#include "doorledger/domain.h"

#include "absl/strings/str_cat.h"
#include "doorledger/codec.h"

namespace doorledger {
namespace {

absl::StatusOr<std::string> RequireString(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing string field '", field, "'"));
  }
  return it->get<std::string>();
}

absl::StatusOr<Bytes> RequireBase64(const Json& j, const char* field) {
  auto s = RequireString(j, field);
  if (!s.ok()) return s.status();
  return FromBase64(*s);
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kAdmin:
      return "Admin";
    case Role::kCeo:
      return "CEO";
    case Role::kManager:
      return "Manager";
    case Role::kEmployee:
      return "Employee";
  }
  return "Employee";
}

absl::StatusOr<Role> ParseRole(std::string_view name) {
  if (name == "Admin") return Role::kAdmin;
  if (name == "CEO") return Role::kCeo;
  if (name == "Manager") return Role::kManager;
  if (name == "Employee") return Role::kEmployee;
  return absl::InvalidArgumentError(absl::StrCat("unknown role: ", std::string(name)));
}

absl::Status ValidateParticipant(const Participant& p) {
  if (p.participant_id.empty()) {
    return absl::InvalidArgumentError("participantId must be non-empty");
  }
  if (p.role == Role::kCeo &&
      (!p.department_id.has_value() || p.department_id->empty())) {
    return absl::InvalidArgumentError("a CEO must carry a departmentId");
  }
  return absl::OkStatus();
}

Json ToJson(const Participant& p) {
  Json j = {{"participantId", p.participant_id},
            {"displayName", p.display_name},
            {"role", RoleName(p.role)}};
  if (p.department_id) j["departmentId"] = *p.department_id;
  return j;
}

Json ToJson(const Department& d) {
  return {{"departmentId", d.department_id},
          {"name", d.name},
          {"ceoParticipantId", d.ceo_participant_id}};
}

Json ToJson(const PhysicalPlace& p) {
  return {{"placeId", p.place_id},
          {"description", p.description},
          {"departmentId", p.department_id}};
}

absl::StatusOr<Participant> ParticipantFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("expected object");
  Participant p;
  auto id = RequireString(j, "participantId");
  if (!id.ok()) return id.status();
  p.participant_id = *id;
  p.display_name = j.value("displayName", "");
  auto role = ParseRole(j.value("role", ""));
  if (!role.ok()) return role.status();
  p.role = *role;
  if (auto it = j.find("departmentId"); it != j.end() && it->is_string()) {
    p.department_id = it->get<std::string>();
  }
  if (auto st = ValidateParticipant(p); !st.ok()) return st;
  return p;
}

absl::StatusOr<Department> DepartmentFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("expected object");
  Department d;
  auto id = RequireString(j, "departmentId");
  if (!id.ok()) return id.status();
  auto ceo = RequireString(j, "ceoParticipantId");
  if (!ceo.ok()) return ceo.status();
  d.department_id = *id;
  d.ceo_participant_id = *ceo;
  d.name = j.value("name", "");
  if (d.department_id.empty() || d.ceo_participant_id.empty()) {
    return absl::InvalidArgumentError("department ids must be non-empty");
  }
  return d;
}

absl::StatusOr<PhysicalPlace> PlaceFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("expected object");
  PhysicalPlace p;
  auto id = RequireString(j, "placeId");
  if (!id.ok()) return id.status();
  auto dept = RequireString(j, "departmentId");
  if (!dept.ok()) return dept.status();
  p.place_id = *id;
  p.department_id = *dept;
  p.description = j.value("description", "");
  if (p.place_id.empty() || p.department_id.empty()) {
    return absl::InvalidArgumentError("place ids must be non-empty");
  }
  return p;
}

Bytes CardSigningBytes(std::string_view card_id, std::string_view participant_id,
                       const PublicKey& public_key) {
  return Encoder()
      .Str(card_id)
      .Str(participant_id)
      .Blob(public_key.bytes)
      .bytes();
}

absl::StatusOr<HolderCard> IssueCard(std::string_view participant_id,
                                     const SigningKey& issuer,
                                     const ParticipantRegistered& registered,
                                     Timestamp issued_at) {
  if (participant_id.empty() || !registered(participant_id)) {
    return absl::NotFoundError(
        absl::StrCat("UnknownParticipant: ", std::string(participant_id)));
  }
  HolderCard out;
  out.key = GenerateSigningKey();
  out.card.card_id = ToHex(RandomBytes(16));
  out.card.participant_id = std::string(participant_id);
  out.card.public_key = out.key.public_key;
  out.card.issued_at = issued_at;
  out.card.certificate = SignPayload(
      issuer, CardSigningBytes(out.card.card_id, out.card.participant_id,
                               out.card.public_key));
  return out;
}

bool VerifyCard(const IdentityCard& card, const PublicKey& issuer) {
  return VerifyPayload(issuer,
                       CardSigningBytes(card.card_id, card.participant_id,
                                        card.public_key),
                       card.certificate);
}

Json ToJson(const IdentityCard& card) {
  return {{"cardId", card.card_id},
          {"participantId", card.participant_id},
          {"publicKey", ToBase64(card.public_key.bytes)},
          {"certificate", ToBase64(card.certificate)},
          {"issuedAt", FormatRfc3339(card.issued_at)}};
}

Json ToJson(const HolderCard& card) {
  Json j = ToJson(card.card);
  j["privateKey"] = ToBase64(card.key.secret);
  if (card.gateway) j["gateway"] = *card.gateway;
  return j;
}

absl::StatusOr<IdentityCard> CardFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("expected object");
  IdentityCard card;
  auto id = RequireString(j, "cardId");
  if (!id.ok()) return id.status();
  auto participant = RequireString(j, "participantId");
  if (!participant.ok()) return participant.status();
  auto pub = RequireBase64(j, "publicKey");
  if (!pub.ok()) return pub.status();
  auto cert = RequireBase64(j, "certificate");
  if (!cert.ok()) return cert.status();
  auto issued = RequireString(j, "issuedAt");
  if (!issued.ok()) return issued.status();
  auto issued_at = ParseRfc3339(*issued);
  if (!issued_at.ok()) return issued_at.status();
  card.card_id = *id;
  card.participant_id = *participant;
  card.public_key.bytes = *std::move(pub);
  card.certificate = *std::move(cert);
  card.issued_at = *issued_at;
  return card;
}

absl::StatusOr<HolderCard> HolderCardFromJson(const Json& j) {
  auto card = CardFromJson(j);
  if (!card.ok()) return card.status();
  auto secret = RequireBase64(j, "privateKey");
  if (!secret.ok()) return secret.status();
  auto key = SigningKeyFromSecret(*secret);
  if (!key.ok()) return key.status();
  if (key->public_key != card->public_key) {
    return absl::InvalidArgumentError("privateKey does not match publicKey");
  }
  HolderCard out{*std::move(card), *std::move(key), std::nullopt};
  if (auto it = j.find("gateway"); it != j.end() && it->is_string()) {
    out.gateway = it->get<std::string>();
  }
  return out;
}

absl::StatusOr<HolderCard> LoadCardFile(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto j = ParseJson(*text);
  if (!j.ok()) return j.status();
  return HolderCardFromJson(*j);
}

absl::Status SaveCardFile(const std::string& path, const HolderCard& card) {
  return WriteFile(path, ToJson(card).dump(2) + "\n");
}

}  // namespace doorledger
