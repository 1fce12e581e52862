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

#ifndef DOORLEDGER_NETWORK_H_
#define DOORLEDGER_NETWORK_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/events.h"
#include "doorledger/genesis.h"
#include "doorledger/ledger.h"
#include "doorledger/validation.h"

namespace doorledger {

struct Endorsement {
  std::string peer_id;
  std::string org_id;
  chaincode::ExecutionResult result;
  Bytes result_bytes;
  Hash32 response_hash{};
  // Over EndorsementSigningBytes(proposal, result).
  Signature signature;
};

struct TxStatus {
  std::string tx_id;
  TxValidity validity = TxValidity::kValid;
  uint64_t block_height = 0;
  uint32_t tx_offset = 0;
  chaincode::ExecutionResult result;
};

class Peer {
 public:
  struct Options {
    // Empty: memory only.
    std::string data_dir;
    // A state snapshot is written every this many blocks; 0 disables.
    uint64_t snapshot_interval = 10;
    // Out-of-order blocks further ahead than this are rejected (BadHeight).
    uint64_t reorder_window = 64;
  };

  // Starts from `genesis`, or resumes from the block file and snapshot
  // under options.data_dir when they exist.
  static absl::StatusOr<std::unique_ptr<Peer>> Open(PeerIdentity identity,
                                                    SigningKey key,
                                                    const Block& genesis,
                                                    Options options);

  // Simulates `proposal` against the latest committed state. Never
  // mutates state. Unauthenticated("BadSignature ...") or
  // PermissionDenied("RevokedCard ...") when the proposal is rejected.
  absl::StatusOr<Endorsement> Endorse(const Proposal& proposal,
                                      uint32_t attempt = 0) const;

  // Blocks ahead of the tip are buffered up to the reorder window. Blocks
  // at or below the tip are ignored if identical.
  absl::Status Deliver(Block block);

  // Resolves once `tx_id` commits (immediately if it already has).
  std::future<TxStatus> WatchTx(const std::string& tx_id);
  std::optional<TxStatus> FindTx(const std::string& tx_id) const;

  const PeerIdentity& identity() const { return identity_; }
  const GenesisConfig& config() const { return validator_.config(); }
  uint64_t height() const;
  Hash32 tip_hash() const;
  std::shared_ptr<const WorldState> state() const;
  Hash32 StateHash() const { return state()->Hash(); }
  std::optional<Block> BlockAt(uint64_t height) const;
  std::vector<Block> Blocks() const;
  Historian& historian() { return historian_; }
  const Historian& historian() const { return historian_; }
  EventBus& events() { return events_; }
  // Path of the block file; empty for a memory-only peer.
  std::string block_file_path() const;

  // Re-verifies the block file when persistent, the in-memory chain
  // otherwise.
  VerificationReport VerifyLedger() const;

 private:
  Peer(PeerIdentity identity, SigningKey key, GenesisConfig config,
       Options options);

  absl::Status Recover(const Block& genesis);
  absl::Status CommitLocked(Block block, bool persist);
  absl::Status WriteSnapshotLocked();

  PeerIdentity identity_;
  SigningKey key_;
  BlockValidator validator_;
  chaincode::ChainConfig chain_config_;
  Options options_;

  // Serializes the commit path.
  mutable std::mutex commit_mu_;
  std::map<uint64_t, Block> pending_;
  std::unique_ptr<BlockFile> file_;
  WorldState working_;

  mutable std::mutex read_mu_;
  std::vector<Block> chain_;
  std::shared_ptr<const WorldState> snapshot_;
  std::map<std::string, std::pair<uint64_t, uint32_t>> tx_index_;
  std::multimap<std::string, std::promise<TxStatus>> watchers_;

  Historian historian_;
  EventBus events_;
};

// Client side: envelope from endorsements that cover `orgs` and agree on
// the result bytes. FailedPrecondition("PolicyUnsatisfied ...") or
// Aborted("EndorsementMismatch").
absl::StatusOr<TransactionEnvelope> Assemble(
    const Proposal& proposal, uint32_t attempt,
    const std::vector<Endorsement>& endorsements,
    const std::set<std::string>& orgs);

class Orderer {
 public:
  using Sink = std::function<void(const Block&)>;
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  // Continues the chain after (tip_height, tip_hash).
  Orderer(uint64_t tip_height, const Hash32& tip_hash, uint32_t max_block_size,
          std::chrono::milliseconds batch_timeout, Clock clock = nullptr);
  ~Orderer();

  Orderer(const Orderer&) = delete;
  Orderer& operator=(const Orderer&) = delete;

  // Must be called before Start() or the first Submit().
  void AddSink(Sink sink);

  // Queues in arrival order. Without a running worker a full batch is cut
  // and delivered on the caller's thread.
  void Submit(TransactionEnvelope envelope);

  // Cuts up to max_block_size queued envelopes; nullopt when empty.
  std::optional<Block> CutBlock();
  // Cuts only if the oldest queued envelope has waited batch_timeout.
  std::optional<Block> Tick();

  // Worker thread cutting by size or timeout.
  void Start();
  void Stop();
  bool running() const { return worker_.joinable(); }

  uint64_t height() const;
  size_t queued() const;

 private:
  std::optional<Block> CutLocked();
  void Deliver(const Block& block);
  void Run();

  const uint32_t max_block_size_;
  const std::chrono::milliseconds batch_timeout_;
  Clock clock_;
  std::vector<Sink> sinks_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<TransactionEnvelope> queue_;
  std::chrono::steady_clock::time_point oldest_;
  uint64_t last_height_ = 0;
  Hash32 last_hash_{};
  bool stop_ = false;
  // Cut and delivery happen under this so blocks leave in height order.
  std::mutex deliver_mu_;
  std::thread worker_;
};

struct PeerSpec {
  PeerIdentity identity;
  SigningKey key;
};

struct TxOutcome {
  std::string tx_id;
  // False when the chaincode response was an error; nothing was ordered.
  bool submitted = false;
  TxValidity validity = TxValidity::kValid;
  uint64_t block_height = 0;
  uint32_t tx_offset = 0;
  uint32_t attempts = 0;
  chaincode::ExecutionResult result;

  bool committed_valid() const {
    return submitted && validity == TxValidity::kValid && result.response.ok();
  }
};

class Network {
 public:
  struct Options {
    std::string data_dir;
    // Start the orderer worker; otherwise blocks are cut by hand.
    bool threaded = false;
    uint32_t mvcc_retries = 3;
    std::chrono::milliseconds delivery_delay{0};
    std::chrono::milliseconds commit_timeout{30000};
    uint64_t snapshot_interval = 10;
  };

  static absl::StatusOr<std::unique_ptr<Network>> Create(
      const GenesisConfig& config, std::vector<PeerSpec> peers,
      Options options);
  ~Network();

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const Block& genesis() const { return genesis_; }
  const GenesisConfig& config() const { return config_; }
  Orderer& orderer() { return *orderer_; }
  std::vector<Peer*> peers();
  // The peer the gateway exposes.
  Peer& gateway_peer() { return *peers_.front(); }

  // One endorsement per policy org.
  absl::StatusOr<std::vector<Endorsement>> CollectEndorsements(
      const Proposal& proposal, uint32_t attempt);

  // endorse, assemble, order, wait for commit; re-endorses on InvalidMvcc
  // up to mvcc_retries times, then Aborted("MvccRetryExhausted"). A
  // chaincode error returns an outcome with submitted = false.
  absl::StatusOr<TxOutcome> SubmitAndWait(const Proposal& proposal);

  // Flushes the orderer queue by hand (manual mode).
  void Flush();

  // True when every peer has the same height, state hash and tip.
  bool Converged() const;

 private:
  Network(GenesisConfig config, Block genesis, Options options);

  GenesisConfig config_;
  Block genesis_;
  Options options_;
  std::vector<std::unique_ptr<Peer>> peers_;
  std::unique_ptr<Orderer> orderer_;
};

}  // namespace doorledger

#endif  // DOORLEDGER_NETWORK_H_
