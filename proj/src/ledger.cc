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

#include "doorledger/ledger.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "doorledger/codec.h"

namespace doorledger {
namespace {

void EncodeCard(Encoder& enc, const IdentityCard& card) {
  enc.Str(card.card_id)
      .Str(card.participant_id)
      .Blob(card.public_key.bytes)
      .Blob(card.certificate)
      .Time(card.issued_at);
}

IdentityCard DecodeCard(Decoder& dec) {
  IdentityCard card;
  card.card_id = dec.Str();
  card.participant_id = dec.Str();
  card.public_key.bytes = dec.Blob();
  card.certificate = dec.Blob();
  card.issued_at = dec.Time();
  return card;
}

void EncodeProposal(Encoder& enc, const Proposal& p) {
  enc.Str(CanonicalJson(chaincode::ToJson(p.payload)));
  EncodeCard(enc, p.card);
  enc.Blob(p.nonce).Time(p.proposed_at).Blob(p.client_signature);
}

Proposal DecodeProposal(Decoder& dec) {
  Proposal p;
  auto j = ParseJson(dec.Str());
  if (!j.ok()) throw DecodeError("payload is not JSON");
  auto payload = chaincode::PayloadFromJson(*j);
  if (!payload.ok()) throw DecodeError("payload malformed");
  p.payload = *std::move(payload);
  p.card = DecodeCard(dec);
  p.nonce = dec.Blob();
  p.proposed_at = dec.Time();
  p.client_signature = dec.Blob();
  return p;
}

Hash32 ReadHash(Decoder& dec) {
  Bytes b = dec.Raw(32);
  Hash32 h;
  std::copy(b.begin(), b.end(), h.begin());
  return h;
}

}  // namespace

std::string_view ValidityName(TxValidity v) {
  switch (v) {
    case TxValidity::kValid:
      return "Valid";
    case TxValidity::kInvalidMvcc:
      return "InvalidMvcc";
    case TxValidity::kInvalidEndorsement:
      return "InvalidEndorsement";
  }
  return "Valid";
}

Bytes ProposalSigningBytes(const chaincode::TransactionPayload& payload,
                           std::string_view card_id, ByteView nonce,
                           Timestamp proposed_at) {
  Json j = {{"cardId", card_id},
            {"nonce", ToBase64(nonce)},
            {"payload", chaincode::ToJson(payload)},
            {"proposedAt", FormatRfc3339(proposed_at)}};
  std::string s = CanonicalJson(j);
  return Bytes(s.begin(), s.end());
}

Bytes ProposalSigningBytes(const Proposal& proposal) {
  return ProposalSigningBytes(proposal.payload, proposal.card.card_id,
                              proposal.nonce, proposal.proposed_at);
}

Proposal MakeProposal(const HolderCard& holder,
                      chaincode::TransactionPayload payload,
                      Timestamp proposed_at) {
  Proposal p;
  p.payload = std::move(payload);
  p.card = holder.card;
  p.nonce = RandomBytes(16);
  p.proposed_at = proposed_at;
  p.client_signature = SignPayload(holder.key, ProposalSigningBytes(p));
  return p;
}

Bytes ProposalBytes(const Proposal& proposal) {
  Encoder enc;
  EncodeProposal(enc, proposal);
  return std::move(enc).bytes();
}

std::string ComputeTxId(const Proposal& proposal, uint32_t attempt) {
  Encoder enc;
  enc.Blob(ProposalBytes(proposal)).U32(attempt);
  return HashHex(Sha256(enc.bytes()));
}

Bytes EndorsementSigningBytes(const Proposal& proposal,
                              const chaincode::ExecutionResult& result) {
  return Encoder()
      .Blob(ProposalBytes(proposal))
      .Blob(chaincode::ResultBytes(result))
      .bytes();
}

Bytes EncodeEnvelope(const TransactionEnvelope& env) {
  Encoder enc;
  enc.Str(env.tx_id).U32(env.attempt);
  EncodeProposal(enc, env.proposal);
  chaincode::Encode(enc, env.result);
  enc.U32(static_cast<uint32_t>(env.endorsements.size()));
  for (const EndorsementSig& e : env.endorsements) {
    enc.Str(e.peer_id).Str(e.org_id).Blob(e.signature);
  }
  return std::move(enc).bytes();
}

TransactionEnvelope DecodeEnvelope(ByteView bytes) {
  Decoder dec(bytes);
  TransactionEnvelope env;
  env.tx_id = dec.Str();
  env.attempt = dec.U32();
  env.proposal = DecodeProposal(dec);
  env.result = chaincode::DecodeExecutionResult(dec);
  uint32_t n = dec.U32();
  for (uint32_t i = 0; i < n; ++i) {
    EndorsementSig e;
    e.peer_id = dec.Str();
    e.org_id = dec.Str();
    e.signature = dec.Blob();
    env.endorsements.push_back(std::move(e));
  }
  dec.ExpectEnd();
  return env;
}

Hash32 ComputeBlockHash(uint64_t height, const Hash32& prev_hash,
                        const Hash32& data_hash, Timestamp timestamp) {
  return Sha256(Encoder()
                    .U64(height)
                    .Raw(prev_hash)
                    .Raw(data_hash)
                    .Time(timestamp)
                    .bytes());
}

Hash32 ComputeDataHash(std::string_view config,
                       const std::vector<TransactionEnvelope>& txs) {
  Encoder enc;
  enc.Str(config).U32(static_cast<uint32_t>(txs.size()));
  for (const TransactionEnvelope& tx : txs) enc.Blob(EncodeEnvelope(tx));
  return Sha256(enc.bytes());
}

void SealBlock(Block& block) {
  block.header.data_hash = ComputeDataHash(block.config, block.transactions);
  block.header.block_hash =
      ComputeBlockHash(block.header.height, block.header.prev_hash,
                       block.header.data_hash, block.header.timestamp);
}

Bytes EncodeBlock(const Block& block) {
  Encoder enc;
  enc.U64(block.header.height)
      .Raw(block.header.prev_hash)
      .Raw(block.header.data_hash)
      .Time(block.header.timestamp)
      .Raw(block.header.block_hash)
      .Str(block.config)
      .U32(static_cast<uint32_t>(block.transactions.size()));
  for (const TransactionEnvelope& tx : block.transactions) {
    enc.Blob(EncodeEnvelope(tx));
  }
  enc.U32(static_cast<uint32_t>(block.validity.size()));
  for (TxValidity v : block.validity) enc.U8(static_cast<uint8_t>(v));
  return std::move(enc).bytes();
}

absl::StatusOr<Block> DecodeBlock(ByteView bytes) {
  try {
    Decoder dec(bytes);
    Block block;
    block.header.height = dec.U64();
    block.header.prev_hash = ReadHash(dec);
    block.header.data_hash = ReadHash(dec);
    block.header.timestamp = dec.Time();
    block.header.block_hash = ReadHash(dec);
    block.config = dec.Str();
    uint32_t n = dec.U32();
    for (uint32_t i = 0; i < n; ++i) {
      Bytes env = dec.Blob();
      block.transactions.push_back(DecodeEnvelope(env));
    }
    uint32_t m = dec.U32();
    for (uint32_t i = 0; i < m; ++i) {
      uint8_t v = dec.U8();
      if (v > static_cast<uint8_t>(TxValidity::kInvalidEndorsement)) {
        throw DecodeError("bad validity flag");
      }
      block.validity.push_back(static_cast<TxValidity>(v));
    }
    dec.ExpectEnd();
    // Any byte that decodes but does not round-trip is not canonical.
    if (EncodeBlock(block) != Bytes(bytes.begin(), bytes.end())) {
      throw DecodeError("non-canonical block encoding");
    }
    return block;
  } catch (const DecodeError& e) {
    return absl::DataLossError(e.what());
  }
}

Bytes BlockFile::Frame(const Block& block) {
  Bytes body = EncodeBlock(block);
  return Encoder().Blob(body).bytes();
}

absl::Status BlockFile::Append(const Block& block) {
  if (!out_.is_open()) {
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) return absl::InternalError(absl::StrCat("cannot open ", path_));
  }
  Bytes frame = Frame(block);
  out_.write(reinterpret_cast<const char*>(frame.data()),
             static_cast<std::streamsize>(frame.size()));
  out_.flush();
  if (!out_) return absl::InternalError(absl::StrCat("write failed ", path_));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Bytes>> BlockFile::SplitFrames(ByteView contents) {
  std::vector<Bytes> frames;
  try {
    Decoder dec(contents);
    while (dec.remaining() > 0) frames.push_back(dec.Blob());
  } catch (const DecodeError&) {
    return absl::DataLossError(
        absl::StrCat("truncated frame after block ", frames.size()));
  }
  return frames;
}

absl::StatusOr<std::vector<Bytes>> BlockFile::ReadFrames(
    const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  return SplitFrames(AsBytes(*contents));
}

Json ToJson(const VerificationReport& report) {
  Json j = {{"ok", report.ok}, {"height", report.height}};
  if (report.first_bad_height) {
    j["failureHeight"] = *report.first_bad_height;
    j["reason"] = report.reason;
  }
  return j;
}

absl::Status CheckSuccessor(const BlockHeader* tip, const Block& block) {
  const uint64_t want_height = tip == nullptr ? 0 : tip->height + 1;
  const Hash32 want_prev = tip == nullptr ? Hash32{} : tip->block_hash;
  if (block.header.height != want_height) {
    return absl::FailedPreconditionError(
        absl::StrCat("BadHeight: expected ", want_height, ", got ",
                     block.header.height));
  }
  if (block.header.prev_hash != want_prev) {
    return absl::FailedPreconditionError(
        absl::StrCat("BrokenLink at height ", block.header.height));
  }
  if (block.header.data_hash !=
      ComputeDataHash(block.config, block.transactions)) {
    return absl::FailedPreconditionError(
        absl::StrCat("BadDataHash at height ", block.header.height));
  }
  if (block.header.block_hash !=
      ComputeBlockHash(block.header.height, block.header.prev_hash,
                       block.header.data_hash, block.header.timestamp)) {
    return absl::FailedPreconditionError(
        absl::StrCat("BadBlockHash at height ", block.header.height));
  }
  if (block.header.height > 0 && !block.config.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("config outside genesis at height ", block.header.height));
  }
  return absl::OkStatus();
}

VerificationReport VerifyChainStructure(const std::vector<Block>& blocks) {
  if (blocks.empty()) return VerificationReport::Failure(0, "empty chain");
  const BlockHeader* tip = nullptr;
  for (size_t h = 0; h < blocks.size(); ++h) {
    const Block& b = blocks[h];
    if (auto st = CheckSuccessor(tip, b); !st.ok()) {
      return VerificationReport::Failure(h, std::string(st.message()));
    }
    if (b.validity.size() != b.transactions.size()) {
      return VerificationReport::Failure(h, "validity flag count mismatch");
    }
    tip = &b.header;
  }
  return {true, blocks.size() - 1, std::nullopt, ""};
}

Json ToJson(const HistorianRecord& r) {
  Json events = Json::array();
  for (auto k : r.events) events.push_back(chaincode::EventKindName(k));
  Json j = {{"txId", r.tx_id},
            {"transactionType", r.transaction_type},
            {"participantId", r.participant_id},
            {"timestamp", FormatRfc3339(r.timestamp)},
            {"valid", r.valid()},
            {"validity", ValidityName(r.validity)},
            {"events", events},
            {"blockHeight", r.block_height},
            {"txOffset", r.tx_offset}};
  if (r.decision) j["decision"] = acl::ToJson(*r.decision);
  return j;
}

absl::StatusOr<HistorianRecord> HistorianRecordFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("record object");
  HistorianRecord r;
  r.tx_id = j.value("txId", "");
  r.transaction_type = j.value("transactionType", "");
  r.participant_id = j.value("participantId", "");
  auto ts = ParseRfc3339(j.value("timestamp", ""));
  if (!ts.ok()) return ts.status();
  r.timestamp = *ts;
  std::string validity = j.value("validity", "Valid");
  if (validity == "Valid") {
    r.validity = TxValidity::kValid;
  } else if (validity == "InvalidMvcc") {
    r.validity = TxValidity::kInvalidMvcc;
  } else {
    r.validity = TxValidity::kInvalidEndorsement;
  }
  for (const Json& e : j.value("events", Json::array())) {
    auto k = chaincode::ParseEventKind(e.get<std::string>());
    if (!k.ok()) return k.status();
    r.events.push_back(*k);
  }
  if (j.contains("decision")) {
    auto d = acl::DecisionFromJson(j["decision"]);
    if (!d.ok()) return d.status();
    r.decision = *d;
  }
  r.block_height = j.value("blockHeight", uint64_t{0});
  r.tx_offset = j.value("txOffset", uint32_t{0});
  return r;
}

void Historian::Append(HistorianRecord record) {
  std::lock_guard<std::mutex> lock(mu_);
  records_.push_back(std::move(record));
}

size_t Historian::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

std::vector<HistorianRecord> Historian::Query(
    const HistorianFilter& filter) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<HistorianRecord> out;
  for (const HistorianRecord& r : records_) {
    if (filter.participant_id && r.participant_id != *filter.participant_id) {
      continue;
    }
    if (filter.transaction_type &&
        r.transaction_type != *filter.transaction_type) {
      continue;
    }
    if (filter.from && r.timestamp < *filter.from) continue;
    if (filter.to && r.timestamp > *filter.to) continue;
    out.push_back(r);
  }
  if (filter.limit && out.size() > *filter.limit) {
    out.erase(out.begin(),
              out.begin() + static_cast<ptrdiff_t>(out.size() - *filter.limit));
  }
  return out;
}

std::string EventId(const EventCoord& c) {
  return absl::StrCat(c.height, "-", c.offset, "-", c.index);
}

std::vector<CommittedEvent> RecordBlock(Historian& historian,
                                        const Block& block) {
  std::vector<CommittedEvent> events;
  const uint64_t height = block.header.height;
  for (size_t i = 0; i < block.transactions.size(); ++i) {
    const TransactionEnvelope& tx = block.transactions[i];
    const auto offset = static_cast<uint32_t>(i);
    const TxValidity validity =
        i < block.validity.size() ? block.validity[i] : TxValidity::kValid;
    HistorianRecord record;
    record.tx_id = tx.tx_id;
    record.transaction_type = chaincode::PayloadTypeName(tx.proposal.payload);
    record.participant_id = tx.proposal.card.participant_id;
    record.timestamp = tx.proposal.proposed_at;
    record.validity = validity;
    record.decision = tx.result.decision;
    record.block_height = height;
    record.tx_offset = offset;
    if (validity == TxValidity::kValid) {
      for (size_t k = 0; k < tx.result.events.size(); ++k) {
        record.events.push_back(tx.result.events[k].kind);
        events.push_back({EventCoord{height, offset, static_cast<uint32_t>(k)},
                          tx.result.events[k]});
      }
    }
    historian.Append(std::move(record));
  }
  return events;
}

std::vector<CommittedEvent> CommitBlock(WorldState& state, Historian& historian,
                                        const Block& block) {
  for (size_t i = 0; i < block.transactions.size(); ++i) {
    if (i < block.validity.size() && block.validity[i] != TxValidity::kValid) {
      continue;
    }
    const auto offset = static_cast<uint32_t>(i);
    for (const chaincode::KeyWrite& w : block.transactions[i].result.rwset.writes) {
      state.Apply(w.key, w.value, Version{block.header.height, offset});
    }
  }
  return RecordBlock(historian, block);
}

}  // namespace doorledger
