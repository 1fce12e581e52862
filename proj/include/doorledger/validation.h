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

// The validate phase: endorsement-policy checks and MVCC read-set checks,
// plus whole-chain verification and replay built on them.

#ifndef DOORLEDGER_VALIDATION_H_
#define DOORLEDGER_VALIDATION_H_

#include <map>
#include <string>
#include <vector>

#include "doorledger/genesis.h"
#include "doorledger/ledger.h"
#include "doorledger/state.h"

namespace doorledger {

class BlockValidator {
 public:
  explicit BlockValidator(GenesisConfig config);

  // Card certificate, client signature, txId, and one verifying endorsement
  // from every policy org over the identical result bytes.
  bool EndorsementsValid(const TransactionEnvelope& tx) const;

  // Flags every transaction of a non-genesis block in order. MVCC reads are
  // compared against `state` as updated by earlier Valid transactions of the
  // same block. `state` itself is not modified.
  std::vector<TxValidity> Validate(const Block& block,
                                   const WorldState& state) const;

  const GenesisConfig& config() const { return config_; }

 private:
  GenesisConfig config_;
  std::map<std::string, PeerIdentity> peers_;
};

// Full verification: structure, then re-validation of every block from
// genesis, comparing recomputed validity flags with the recorded ones.
// On success `state_out` (if given) holds the replayed world state.
VerificationReport VerifyChain(const std::vector<Block>& blocks,
                               WorldState* state_out = nullptr,
                               Historian* historian_out = nullptr);

// Decodes frames first; a frame that does not decode fails at its index.
VerificationReport VerifyFrames(const std::vector<Bytes>& frames);
VerificationReport VerifyBlockFile(const std::string& path);

// Re-derives world state from the log alone. DataLoss("BrokenLink ...")
// style errors on an inconsistent chain.
absl::StatusOr<WorldState> Replay(const std::vector<Block>& blocks);

}  // namespace doorledger

#endif  // DOORLEDGER_VALIDATION_H_
