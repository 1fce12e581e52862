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

// Business entities (participants, departments, doors) and the identity-card
// credential that binds a participant to a signing key.

#ifndef DOORLEDGER_DOMAIN_H_
#define DOORLEDGER_DOMAIN_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "doorledger/common.h"
#include "doorledger/crypto.h"

namespace doorledger {

enum class Role { kAdmin, kCeo, kManager, kEmployee };

std::string_view RoleName(Role role);
absl::StatusOr<Role> ParseRole(std::string_view name);

struct Participant {
  std::string participant_id;
  std::string display_name;
  Role role = Role::kEmployee;
  // Required when role == kCeo.
  std::optional<std::string> department_id;

  friend bool operator==(const Participant&, const Participant&) = default;
};

struct Department {
  std::string department_id;
  std::string name;
  std::string ceo_participant_id;

  friend bool operator==(const Department&, const Department&) = default;
};

// A door. place_id is the identifier the reader reports.
struct PhysicalPlace {
  std::string place_id;
  std::string description;
  std::string department_id;

  friend bool operator==(const PhysicalPlace&, const PhysicalPlace&) = default;
};

absl::Status ValidateParticipant(const Participant& p);

Json ToJson(const Participant& p);
Json ToJson(const Department& d);
Json ToJson(const PhysicalPlace& p);
absl::StatusOr<Participant> ParticipantFromJson(const Json& j);
absl::StatusOr<Department> DepartmentFromJson(const Json& j);
absl::StatusOr<PhysicalPlace> PlaceFromJson(const Json& j);

// The public half of a credential; this is what travels inside proposals.
struct IdentityCard {
  std::string card_id;
  std::string participant_id;
  PublicKey public_key;
  // Issuer signature over CardSigningBytes().
  Signature certificate;
  Timestamp issued_at;

  friend bool operator==(const IdentityCard&, const IdentityCard&) = default;
};

// What a holder keeps on disk: the card plus its private key and, optionally,
// the gateway the holder talks to.
struct HolderCard {
  IdentityCard card;
  SigningKey key;
  std::optional<std::string> gateway;
};

Bytes CardSigningBytes(std::string_view card_id, std::string_view participant_id,
                       const PublicKey& public_key);

using ParticipantRegistered = std::function<bool(std::string_view)>;

// Issues a fresh card (new key pair, random card id) for a registered
// participant. NotFound (UnknownParticipant) otherwise.
absl::StatusOr<HolderCard> IssueCard(std::string_view participant_id,
                                     const SigningKey& issuer,
                                     const ParticipantRegistered& registered,
                                     Timestamp issued_at = Now());

bool VerifyCard(const IdentityCard& card, const PublicKey& issuer);

Json ToJson(const IdentityCard& card);
Json ToJson(const HolderCard& card);
absl::StatusOr<IdentityCard> CardFromJson(const Json& j);
absl::StatusOr<HolderCard> HolderCardFromJson(const Json& j);

absl::StatusOr<HolderCard> LoadCardFile(const std::string& path);
absl::Status SaveCardFile(const std::string& path, const HolderCard& card);

}  // namespace doorledger

#endif  // DOORLEDGER_DOMAIN_H_
