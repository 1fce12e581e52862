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

// The transaction log: hash-chained blocks of endorsed transaction envelopes,
// their binary serialization, the append-only block file, and the historian
// derived from committed blocks.
//
// Header hash input (all big-endian):
//   u64 height | 32B prevHash | 32B dataHash | i64 timestampMillis
// Data hash input:
//   str config | u32 n | n x blob(envelope bytes)
// Block bytes:
//   u64 height | 32B prevHash | 32B dataHash | i64 ts | 32B blockHash |
//   str config | u32 n | n x blob(envelope) | u32 m | m x u8 validity
// Block file: sequence of (u32 length | block bytes).

#ifndef DOORLEDGER_LEDGER_H_
#define DOORLEDGER_LEDGER_H_

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/chaincode.h"
#include "doorledger/crypto.h"
#include "doorledger/domain.h"
#include "doorledger/state.h"

namespace doorledger {

enum class TxValidity : uint8_t { kValid, kInvalidMvcc, kInvalidEndorsement };

std::string_view ValidityName(TxValidity v);

// What the client signs. Signing bytes are the canonical JSON of
// {"cardId","nonce","payload","proposedAt"}.
struct Proposal {
  chaincode::TransactionPayload payload;
  IdentityCard card;
  Bytes nonce;
  Timestamp proposed_at;
  Signature client_signature;
};

Bytes ProposalSigningBytes(const chaincode::TransactionPayload& payload,
                           std::string_view card_id, ByteView nonce,
                           Timestamp proposed_at);
Bytes ProposalSigningBytes(const Proposal& proposal);

Proposal MakeProposal(const HolderCard& holder,
                      chaincode::TransactionPayload payload,
                      Timestamp proposed_at = Now());

// Serialized signed proposal; what endorsers sign together with the result.
Bytes ProposalBytes(const Proposal& proposal);

// Hex SHA-256 over the signed proposal bytes and the submission attempt
// (a proposal re-endorsed after an MVCC conflict gets a fresh id).
std::string ComputeTxId(const Proposal& proposal, uint32_t attempt);

struct EndorsementSig {
  std::string peer_id;
  std::string org_id;
  Signature signature;

  friend bool operator==(const EndorsementSig&, const EndorsementSig&) = default;
};

// Bytes an endorsing peer signs.
Bytes EndorsementSigningBytes(const Proposal& proposal,
                              const chaincode::ExecutionResult& result);

struct TransactionEnvelope {
  std::string tx_id;
  uint32_t attempt = 0;
  Proposal proposal;
  chaincode::ExecutionResult result;
  std::vector<EndorsementSig> endorsements;
};

Bytes EncodeEnvelope(const TransactionEnvelope& env);
TransactionEnvelope DecodeEnvelope(ByteView bytes);  // throws DecodeError

struct BlockHeader {
  uint64_t height = 0;
  Hash32 prev_hash{};
  Hash32 data_hash{};
  Timestamp timestamp;
  Hash32 block_hash{};
};

struct Block {
  BlockHeader header;
  // Canonical JSON network configuration; genesis only, empty otherwise.
  std::string config;
  std::vector<TransactionEnvelope> transactions;
  // Filled by validation; one flag per transaction once committed.
  std::vector<TxValidity> validity;
};

Hash32 ComputeBlockHash(uint64_t height, const Hash32& prev_hash,
                        const Hash32& data_hash, Timestamp timestamp);
Hash32 ComputeDataHash(std::string_view config,
                       const std::vector<TransactionEnvelope>& txs);

// Fills data_hash and block_hash from the other fields.
void SealBlock(Block& block);

Bytes EncodeBlock(const Block& block);
// Strict: the input must be exactly one canonical block encoding.
absl::StatusOr<Block> DecodeBlock(ByteView bytes);

// Append-only file of length-prefixed blocks.
class BlockFile {
 public:
  explicit BlockFile(std::string path) : path_(std::move(path)) {}

  absl::Status Append(const Block& block);
  const std::string& path() const { return path_; }

  // Splits a block file into frames. A truncated trailing frame is an error.
  static absl::StatusOr<std::vector<Bytes>> ReadFrames(const std::string& path);
  static absl::StatusOr<std::vector<Bytes>> SplitFrames(ByteView contents);
  static Bytes Frame(const Block& block);

 private:
  std::string path_;
  std::ofstream out_;
};

struct VerificationReport {
  bool ok = true;
  uint64_t height = 0;  // number of blocks checked - 1 when ok
  std::optional<uint64_t> first_bad_height;
  std::string reason;

  static VerificationReport Failure(uint64_t h, std::string why) {
    return {false, h, h, std::move(why)};
  }
};

Json ToJson(const VerificationReport& report);

// Hash links, data hashes, block hashes and heights. Semantic checks
// (validity flags) live in validation.h.
VerificationReport VerifyChainStructure(const std::vector<Block>& blocks);

// Rejects anything but the next block on top of `tip` (nullptr: expects
// genesis).
absl::Status CheckSuccessor(const BlockHeader* tip, const Block& block);

struct HistorianRecord {
  std::string tx_id;
  std::string transaction_type;
  std::string participant_id;
  Timestamp timestamp;
  TxValidity validity = TxValidity::kValid;
  std::optional<acl::Decision> decision;
  std::vector<chaincode::EventKind> events;
  uint64_t block_height = 0;
  uint32_t tx_offset = 0;

  bool valid() const { return validity == TxValidity::kValid; }
};

Json ToJson(const HistorianRecord& record);
absl::StatusOr<HistorianRecord> HistorianRecordFromJson(const Json& j);

struct HistorianFilter {
  std::optional<std::string> participant_id;
  std::optional<std::string> transaction_type;
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> to;    // inclusive
  // Keeps the newest `limit` matches; output stays in commit order.
  std::optional<size_t> limit;
};

class Historian {
 public:
  void Append(HistorianRecord record);
  std::vector<HistorianRecord> Query(const HistorianFilter& filter) const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<HistorianRecord> records_;
};

// An event with its deterministic coordinates in the log.
struct EventCoord {
  uint64_t height = 0;
  uint32_t offset = 0;
  uint32_t index = 0;

  friend auto operator<=>(const EventCoord&, const EventCoord&) = default;
};

struct CommittedEvent {
  EventCoord coord;
  chaincode::ChainEvent event;
};

std::string EventId(const EventCoord& c);

// Applies the writes of Valid transactions at (height, offset) and appends
// one historian record per transaction. Returns the events of Valid
// transactions in (offset, index) order.
// Historian records and events of one block without touching state.
std::vector<CommittedEvent> RecordBlock(Historian& historian,
                                        const Block& block);

std::vector<CommittedEvent> CommitBlock(WorldState& state, Historian& historian,
                                        const Block& block);

}  // namespace doorledger

#endif  // DOORLEDGER_LEDGER_H_
