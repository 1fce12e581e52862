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

#include "doorledger/validation.h"

#include <set>

#include "absl/strings/str_cat.h"

namespace doorledger {

BlockValidator::BlockValidator(GenesisConfig config)
    : config_(std::move(config)) {
  for (const PeerIdentity& p : config_.peers) peers_[p.peer_id] = p;
}

bool BlockValidator::EndorsementsValid(const TransactionEnvelope& tx) const {
  const Proposal& p = tx.proposal;
  if (!VerifyCard(p.card, config_.ca_public_key)) return false;
  if (!VerifyPayload(p.card.public_key, ProposalSigningBytes(p),
                     p.client_signature)) {
    return false;
  }
  if (tx.tx_id != ComputeTxId(p, tx.attempt)) return false;
  const Bytes signed_bytes = EndorsementSigningBytes(p, tx.result);
  std::set<std::string> orgs;
  for (const EndorsementSig& e : tx.endorsements) {
    auto it = peers_.find(e.peer_id);
    if (it == peers_.end() || it->second.org_id != e.org_id) return false;
    if (!VerifyPayload(it->second.public_key, signed_bytes, e.signature)) {
      return false;
    }
    orgs.insert(e.org_id);
  }
  for (const std::string& org : config_.endorsement_orgs) {
    if (!orgs.contains(org)) return false;
  }
  return true;
}

std::vector<TxValidity> BlockValidator::Validate(
    const Block& block, const WorldState& state) const {
  std::vector<TxValidity> flags;
  flags.reserve(block.transactions.size());
  if (block.header.height == 0) {
    flags.assign(block.transactions.size(), TxValidity::kValid);
    return flags;
  }
  // Versions written by earlier Valid transactions in this block; nullopt
  // marks a deletion.
  std::map<std::string, std::optional<Version>, std::less<>> pending;
  auto current = [&](const std::string& key) -> std::optional<Version> {
    if (auto it = pending.find(key); it != pending.end()) return it->second;
    auto vv = state.Read(key);
    if (!vv) return std::nullopt;
    return vv->version;
  };
  for (size_t i = 0; i < block.transactions.size(); ++i) {
    const TransactionEnvelope& tx = block.transactions[i];
    if (!EndorsementsValid(tx)) {
      flags.push_back(TxValidity::kInvalidEndorsement);
      continue;
    }
    bool stale = false;
    for (const chaincode::KeyRead& r : tx.result.rwset.reads) {
      if (current(r.key) != r.version) {
        stale = true;
        break;
      }
    }
    if (stale) {
      flags.push_back(TxValidity::kInvalidMvcc);
      continue;
    }
    const Version v{block.header.height, static_cast<uint32_t>(i)};
    for (const chaincode::KeyWrite& w : tx.result.rwset.writes) {
      pending[w.key] = w.value ? std::optional<Version>(v) : std::nullopt;
    }
    flags.push_back(TxValidity::kValid);
  }
  return flags;
}

VerificationReport VerifyChain(const std::vector<Block>& blocks,
                               WorldState* state_out,
                               Historian* historian_out) {
  VerificationReport structure = VerifyChainStructure(blocks);
  if (!structure.ok) return structure;
  auto config = ReadGenesisConfig(blocks.front());
  if (!config.ok()) {
    return VerificationReport::Failure(
        0, absl::StrCat("genesis config: ", config.status().message()));
  }
  // The genesis writes must be exactly what the embedded config produces.
  auto rebuilt = BuildGenesisBlock(*config);
  if (!rebuilt.ok() ||
      rebuilt->header.block_hash != blocks.front().header.block_hash) {
    return VerificationReport::Failure(0, "genesis does not match its config");
  }
  BlockValidator validator(*std::move(config));
  WorldState state;
  Historian scratch;
  Historian& historian = historian_out ? *historian_out : scratch;
  for (const Block& b : blocks) {
    if (validator.Validate(b, state) != b.validity) {
      return VerificationReport::Failure(b.header.height,
                                         "validity flags do not re-derive");
    }
    CommitBlock(state, historian, b);
  }
  if (state_out) *state_out = std::move(state);
  return structure;
}

VerificationReport VerifyFrames(const std::vector<Bytes>& frames) {
  std::vector<Block> blocks;
  blocks.reserve(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    auto b = DecodeBlock(frames[i]);
    if (!b.ok()) {
      return VerificationReport::Failure(
          i, absl::StrCat("undecodable block: ", b.status().message()));
    }
    blocks.push_back(*std::move(b));
  }
  return VerifyChain(blocks);
}

VerificationReport VerifyBlockFile(const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) {
    return VerificationReport::Failure(0, std::string(contents.status().message()));
  }
  // Split frame by frame so a damaged length prefix is attributed to the
  // block it belongs to. A wrong length surfaces as truncation further on;
  // the frame it opened fails to decode first.
  std::vector<Bytes> frames;
  ByteView rest = AsBytes(*contents);
  auto truncated = [&frames] {
    VerificationReport earlier = VerifyFrames(frames);
    if (!earlier.ok) return earlier;
    return VerificationReport::Failure(frames.size(), "truncated frame");
  };
  while (!rest.empty()) {
    if (rest.size() < 4) return truncated();
    uint32_t len = (uint32_t{rest[0]} << 24) | (uint32_t{rest[1]} << 16) |
                   (uint32_t{rest[2]} << 8) | uint32_t{rest[3]};
    if (rest.size() - 4 < len) return truncated();
    frames.emplace_back(rest.begin() + 4, rest.begin() + 4 + len);
    rest = rest.subspan(4 + len);
  }
  return VerifyFrames(frames);
}

absl::StatusOr<WorldState> Replay(const std::vector<Block>& blocks) {
  WorldState state;
  VerificationReport report = VerifyChain(blocks, &state);
  if (!report.ok) {
    return absl::DataLossError(absl::StrCat(
        "chain inconsistent at height ", *report.first_bad_height, ": ",
        report.reason));
  }
  return state;
}

}  // namespace doorledger
