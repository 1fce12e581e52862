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

// Transaction processor functions. Execute() simulates one transaction
// against an immutable state snapshot and returns the read-write set, the
// events to publish on commit, and the application response. It never
// mutates state; commit happens later, after ordering and MVCC validation.
//
// World-state key scheme (values are canonical JSON):
//   participant/<id>   place/<id>   dept/<id>   revokedCard/<cardId>
//   dyn/<participantId>/<placeId>          latest grant/revoke entry
//   deleg/<participantId>/<departmentId>   active delegation
//   denials/<participantId>/<placeId>      consecutive denial counter

#ifndef DOORLEDGER_CHAINCODE_H_
#define DOORLEDGER_CHAINCODE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "doorledger/acl.h"
#include "doorledger/codec.h"
#include "doorledger/domain.h"
#include "doorledger/state.h"

namespace doorledger::chaincode {

struct RegisterParticipant {
  Participant participant;
};
struct RegisterPlace {
  PhysicalPlace place;
};
struct RegisterDepartment {
  Department department;
};
struct GrantAccess {
  std::string target_participant_id;
  std::string place_id;
};
struct RevokeAccess {
  std::string target_participant_id;
  std::string place_id;
};
struct DelegateAuthority {
  std::string delegate_participant_id;
  std::string department_id;
};
struct RevokeDelegation {
  std::string delegate_participant_id;
  std::string department_id;
};
struct CheckAccess {
  std::string place_id;
};
struct RevokeCard {
  std::string card_id;
};
// A payload whose type tag this build does not know.
struct UnknownPayload {
  std::string type;
  Json body;
};

using TransactionPayload =
    std::variant<RegisterParticipant, RegisterPlace, RegisterDepartment,
                 GrantAccess, RevokeAccess, DelegateAuthority,
                 RevokeDelegation, CheckAccess, RevokeCard, UnknownPayload>;

std::string PayloadTypeName(const TransactionPayload& payload);
Json ToJson(const TransactionPayload& payload);
// Unrecognized "type" tags decode to UnknownPayload; structurally broken
// bodies are InvalidArgument.
absl::StatusOr<TransactionPayload> PayloadFromJson(const Json& j);

namespace keys {
std::string Participant(std::string_view id);
std::string Place(std::string_view id);
std::string Department(std::string_view id);
std::string RevokedCard(std::string_view card_id);
std::string Dynamic(std::string_view participant_id, std::string_view place_id);
std::string Delegation(std::string_view participant_id,
                       std::string_view department_id);
std::string Denials(std::string_view participant_id, std::string_view place_id);
}  // namespace keys

struct KeyRead {
  std::string key;
  std::optional<Version> version;  // nullopt: key was absent

  friend bool operator==(const KeyRead&, const KeyRead&) = default;
};

struct KeyWrite {
  std::string key;
  std::optional<std::string> value;  // nullopt: delete

  friend bool operator==(const KeyWrite&, const KeyWrite&) = default;
};

// Reads and writes are each key-distinct and sorted by key.
struct ReadWriteSet {
  std::vector<KeyRead> reads;
  std::vector<KeyWrite> writes;

  friend bool operator==(const ReadWriteSet&, const ReadWriteSet&) = default;
};

enum class EventKind {
  kAccessGranted,
  kAccessDenied,
  kAccessGrantChanged,
  kDelegationChanged,
  kIntrusionAlert,
};

std::string_view EventKindName(EventKind kind);
absl::StatusOr<EventKind> ParseEventKind(std::string_view name);

struct ChainEvent {
  EventKind kind = EventKind::kAccessGranted;
  std::string participant_id;
  std::optional<std::string> place_id;
  std::string detail;
  std::string tx_id;  // hex
  // Consecutive denials that triggered a kIntrusionAlert; 0 otherwise.
  uint32_t count = 0;

  friend bool operator==(const ChainEvent&, const ChainEvent&) = default;
};

enum class AppError {
  kOk,
  kNotFound,
  kUnauthorized,
  kAlreadyExists,
  kInvalidArgument,
  kUnknownTransactionType,
};

std::string_view AppErrorName(AppError e);

struct Response {
  AppError code = AppError::kOk;
  std::string message;

  bool ok() const { return code == AppError::kOk; }
  friend bool operator==(const Response&, const Response&) = default;
};

struct ExecutionResult {
  ReadWriteSet rwset;
  std::vector<ChainEvent> events;
  Response response;
  std::optional<acl::Decision> decision;  // CheckAccess only

  friend bool operator==(const ExecutionResult&,
                         const ExecutionResult&) = default;
};

void Encode(Encoder& enc, const ReadWriteSet& rwset);
void Encode(Encoder& enc, const ChainEvent& event);
void Encode(Encoder& enc, const ExecutionResult& result);
ReadWriteSet DecodeReadWriteSet(Decoder& dec);
ChainEvent DecodeEvent(Decoder& dec);
ExecutionResult DecodeExecutionResult(Decoder& dec);
Bytes ResultBytes(const ExecutionResult& result);

Json ToJson(const ChainEvent& event);

struct ChainConfig {
  std::vector<acl::AclRule> rules;
  uint32_t intrusion_threshold = 3;
  // Used to derive a dynamic entry's seq from its key version:
  // seq = blockHeight * max_block_size + txOffset.
  uint32_t max_block_size = 10;
};

// Who is submitting. The peer has already verified the card's certificate
// and signature; execution re-reads role and revocation from state.
struct Submission {
  IdentityCard card;
  std::string tx_id;  // hex
  Timestamp proposed_at;
};

ExecutionResult Execute(const Submission& submission,
                        const TransactionPayload& payload,
                        const StateView& view, const ChainConfig& config);

// Derived seq of a dynamic entry stored at the given version.
uint64_t SeqForVersion(Version version, uint32_t max_block_size);

}  // namespace doorledger::chaincode

#endif  // DOORLEDGER_CHAINCODE_H_
