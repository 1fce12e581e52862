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

#include "doorledger/network.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "absl/strings/str_cat.h"

namespace doorledger {
namespace fs = std::filesystem;

namespace {

constexpr char kBlockFile[] = "blocks.dat";
constexpr char kSnapshotFile[] = "state.json";

struct Snapshot {
  uint64_t height = 0;
  WorldState state;
};

// A snapshot is only trusted when it names a block we hold and its content
// hash still matches.
std::optional<Snapshot> LoadSnapshot(const fs::path& path,
                                     const std::vector<Block>& blocks) {
  auto text = ReadFile(path.string());
  if (!text.ok()) return std::nullopt;
  auto j = ParseJson(*text);
  if (!j.ok() || !j->is_object()) return std::nullopt;
  try {
    uint64_t h = j->at("height").get<uint64_t>();
    if (h >= blocks.size() ||
        HashHex(blocks[h].header.block_hash) !=
            j->at("blockHash").get<std::string>()) {
      return std::nullopt;
    }
    auto state = WorldState::FromSnapshotJson(j->at("state"));
    if (!state.ok() ||
        HashHex(state->Hash()) != j->at("stateHash").get<std::string>()) {
      return std::nullopt;
    }
    return Snapshot{h, *std::move(state)};
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

Peer::Peer(PeerIdentity identity, SigningKey key, GenesisConfig config,
           Options options)
    : identity_(std::move(identity)),
      key_(std::move(key)),
      validator_(std::move(config)),
      chain_config_(ToChainConfig(validator_.config())),
      options_(std::move(options)),
      snapshot_(std::make_shared<const WorldState>()) {}

absl::StatusOr<std::unique_ptr<Peer>> Peer::Open(PeerIdentity identity,
                                                 SigningKey key,
                                                 const Block& genesis,
                                                 Options options) {
  auto config = ReadGenesisConfig(genesis);
  if (!config.ok()) return config.status();
  std::unique_ptr<Peer> peer(new Peer(std::move(identity), std::move(key),
                                      *std::move(config), std::move(options)));
  if (auto st = peer->Recover(genesis); !st.ok()) return st;
  return peer;
}

absl::Status Peer::Recover(const Block& genesis) {
  std::lock_guard<std::mutex> commit(commit_mu_);
  if (options_.data_dir.empty()) return CommitLocked(genesis, false);

  std::error_code ec;
  fs::create_directories(options_.data_dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", options_.data_dir, ": ", ec.message()));
  }
  const fs::path dir(options_.data_dir);
  file_ = std::make_unique<BlockFile>((dir / kBlockFile).string());
  if (!fs::exists(dir / kBlockFile) || fs::file_size(dir / kBlockFile) == 0) {
    return CommitLocked(genesis, true);
  }

  auto frames = BlockFile::ReadFrames(file_->path());
  if (!frames.ok()) return frames.status();
  std::vector<Block> blocks;
  for (const Bytes& f : *frames) {
    auto b = DecodeBlock(f);
    if (!b.ok()) return b.status();
    blocks.push_back(*std::move(b));
  }
  VerificationReport structure = VerifyChainStructure(blocks);
  if (!structure.ok) {
    return absl::DataLossError(absl::StrCat(
        "block file inconsistent at height ", *structure.first_bad_height,
        ": ", structure.reason));
  }
  if (blocks.front().header.block_hash != genesis.header.block_hash) {
    return absl::FailedPreconditionError(
        absl::StrCat(file_->path(), " belongs to a different network"));
  }

  size_t start = 0;
  if (auto snap = LoadSnapshot(dir / kSnapshotFile, blocks)) {
    working_ = std::move(snap->state);
    for (size_t h = 0; h <= snap->height; ++h) {
      events_.Publish(RecordBlock(historian_, blocks[h]));
    }
    start = snap->height + 1;
  }
  for (size_t h = start; h < blocks.size(); ++h) {
    if (validator_.Validate(blocks[h], working_) != blocks[h].validity) {
      return absl::DataLossError(
          absl::StrCat("validity flags do not re-derive at height ", h));
    }
    events_.Publish(CommitBlock(working_, historian_, blocks[h]));
  }

  std::lock_guard<std::mutex> lock(read_mu_);
  for (const Block& b : blocks) {
    for (size_t i = 0; i < b.transactions.size(); ++i) {
      tx_index_[b.transactions[i].tx_id] = {b.header.height,
                                           static_cast<uint32_t>(i)};
    }
  }
  chain_ = std::move(blocks);
  snapshot_ = std::make_shared<const WorldState>(working_);
  return absl::OkStatus();
}

absl::Status Peer::CommitLocked(Block block, bool persist) {
  const BlockHeader* tip = chain_.empty() ? nullptr : &chain_.back().header;
  if (auto st = CheckSuccessor(tip, block); !st.ok()) return st;
  block.validity = validator_.Validate(block, working_);
  if (persist && file_) {
    if (auto st = file_->Append(block); !st.ok()) return st;
  }
  std::vector<CommittedEvent> events = CommitBlock(working_, historian_, block);
  auto snap = std::make_shared<const WorldState>(working_);

  std::vector<std::pair<std::promise<TxStatus>, TxStatus>> ready;
  const uint64_t height = block.header.height;
  {
    std::lock_guard<std::mutex> lock(read_mu_);
    snapshot_ = snap;
    for (size_t i = 0; i < block.transactions.size(); ++i) {
      const TransactionEnvelope& tx = block.transactions[i];
      const auto offset = static_cast<uint32_t>(i);
      tx_index_[tx.tx_id] = {height, offset};
      auto [lo, hi] = watchers_.equal_range(tx.tx_id);
      for (auto it = lo; it != hi; ++it) {
        ready.emplace_back(std::move(it->second),
                           TxStatus{tx.tx_id, block.validity[i], height,
                                    offset, tx.result});
      }
      watchers_.erase(lo, hi);
    }
    chain_.push_back(std::move(block));
  }
  events_.Publish(std::move(events));
  for (auto& [promise, status] : ready) promise.set_value(std::move(status));

  if (persist && file_ && options_.snapshot_interval > 0 &&
      height % options_.snapshot_interval == 0) {
    return WriteSnapshotLocked();
  }
  return absl::OkStatus();
}

absl::Status Peer::WriteSnapshotLocked() {
  const fs::path dir(options_.data_dir);
  Json j = {{"height", chain_.back().header.height},
            {"blockHash", HashHex(chain_.back().header.block_hash)},
            {"stateHash", HashHex(working_.Hash())},
            {"state", working_.ToSnapshotJson()}};
  const fs::path tmp = dir / (std::string(kSnapshotFile) + ".tmp");
  if (auto st = WriteFile(tmp.string(), CanonicalJson(j)); !st.ok()) return st;
  std::error_code ec;
  fs::rename(tmp, dir / kSnapshotFile, ec);
  if (ec) return absl::InternalError(absl::StrCat("snapshot: ", ec.message()));
  return absl::OkStatus();
}

absl::StatusOr<Endorsement> Peer::Endorse(const Proposal& proposal,
                                          uint32_t attempt) const {
  const IdentityCard& card = proposal.card;
  if (!VerifyCard(card, validator_.config().ca_public_key)) {
    return absl::UnauthenticatedError(
        absl::StrCat("BadSignature: certificate of card ", card.card_id));
  }
  if (!VerifyPayload(card.public_key, ProposalSigningBytes(proposal),
                     proposal.client_signature)) {
    return absl::UnauthenticatedError("BadSignature: client signature");
  }
  std::shared_ptr<const WorldState> view = state();
  if (view->Read(chaincode::keys::RevokedCard(card.card_id))) {
    return absl::PermissionDeniedError(
        absl::StrCat("RevokedCard: ", card.card_id));
  }
  chaincode::Submission submission{card, ComputeTxId(proposal, attempt),
                                   proposal.proposed_at};
  Endorsement e;
  e.peer_id = identity_.peer_id;
  e.org_id = identity_.org_id;
  e.result = chaincode::Execute(submission, proposal.payload, *view,
                                chain_config_);
  e.result_bytes = chaincode::ResultBytes(e.result);
  e.response_hash = Sha256(e.result_bytes);
  e.signature = SignPayload(key_, EndorsementSigningBytes(proposal, e.result));
  return e;
}

absl::Status Peer::Deliver(Block block) {
  std::lock_guard<std::mutex> commit(commit_mu_);
  const uint64_t tip = chain_.back().header.height;
  const uint64_t h = block.header.height;
  if (h <= tip) {
    if (chain_[h].header.block_hash == block.header.block_hash) {
      return absl::OkStatus();
    }
    return absl::FailedPreconditionError(
        absl::StrCat("BrokenLink: conflicting block at height ", h));
  }
  if (h > tip + 1) {
    if (h - tip > options_.reorder_window) {
      return absl::OutOfRangeError(absl::StrCat(
          "BadHeight: ", h, " is beyond the reorder window at tip ", tip));
    }
    pending_.emplace(h, std::move(block));
    return absl::OkStatus();
  }
  if (auto st = CommitLocked(std::move(block), true); !st.ok()) return st;
  while (!pending_.empty() &&
         pending_.begin()->first == chain_.back().header.height + 1) {
    Block next = std::move(pending_.begin()->second);
    pending_.erase(pending_.begin());
    if (auto st = CommitLocked(std::move(next), true); !st.ok()) return st;
  }
  return absl::OkStatus();
}

std::future<TxStatus> Peer::WatchTx(const std::string& tx_id) {
  std::promise<TxStatus> promise;
  std::future<TxStatus> future = promise.get_future();
  std::lock_guard<std::mutex> lock(read_mu_);
  auto it = tx_index_.find(tx_id);
  if (it != tx_index_.end()) {
    const Block& b = chain_[it->second.first];
    promise.set_value(TxStatus{tx_id, b.validity[it->second.second],
                               it->second.first, it->second.second,
                               b.transactions[it->second.second].result});
  } else {
    watchers_.emplace(tx_id, std::move(promise));
  }
  return future;
}

std::optional<TxStatus> Peer::FindTx(const std::string& tx_id) const {
  std::lock_guard<std::mutex> lock(read_mu_);
  auto it = tx_index_.find(tx_id);
  if (it == tx_index_.end()) return std::nullopt;
  const Block& b = chain_[it->second.first];
  return TxStatus{tx_id, b.validity[it->second.second], it->second.first,
                  it->second.second, b.transactions[it->second.second].result};
}

uint64_t Peer::height() const {
  std::lock_guard<std::mutex> lock(read_mu_);
  return chain_.back().header.height;
}

Hash32 Peer::tip_hash() const {
  std::lock_guard<std::mutex> lock(read_mu_);
  return chain_.back().header.block_hash;
}

std::shared_ptr<const WorldState> Peer::state() const {
  std::lock_guard<std::mutex> lock(read_mu_);
  return snapshot_;
}

std::optional<Block> Peer::BlockAt(uint64_t height) const {
  std::lock_guard<std::mutex> lock(read_mu_);
  if (height >= chain_.size()) return std::nullopt;
  return chain_[height];
}

std::vector<Block> Peer::Blocks() const {
  std::lock_guard<std::mutex> lock(read_mu_);
  return chain_;
}

std::string Peer::block_file_path() const {
  return file_ ? file_->path() : std::string();
}

VerificationReport Peer::VerifyLedger() const {
  if (file_) {
    // Holding the commit lock keeps a half-written frame out of the read.
    std::lock_guard<std::mutex> commit(commit_mu_);
    return VerifyBlockFile(file_->path());
  }
  std::vector<Bytes> frames;
  for (const Block& b : Blocks()) frames.push_back(EncodeBlock(b));
  return VerifyFrames(frames);
}

absl::StatusOr<TransactionEnvelope> Assemble(
    const Proposal& proposal, uint32_t attempt,
    const std::vector<Endorsement>& endorsements,
    const std::set<std::string>& orgs) {
  for (const std::string& org : orgs) {
    if (std::none_of(endorsements.begin(), endorsements.end(),
                     [&](const Endorsement& e) { return e.org_id == org; })) {
      return absl::FailedPreconditionError(
          absl::StrCat("PolicyUnsatisfied: no endorsement from ", org));
    }
  }
  if (endorsements.empty()) {
    return absl::FailedPreconditionError("PolicyUnsatisfied: no endorsements");
  }
  for (const Endorsement& e : endorsements) {
    if (e.result_bytes != endorsements.front().result_bytes) {
      return absl::AbortedError(absl::StrCat(
          "EndorsementMismatch: ", e.peer_id, " disagrees with ",
          endorsements.front().peer_id));
    }
  }
  TransactionEnvelope env;
  env.tx_id = ComputeTxId(proposal, attempt);
  env.attempt = attempt;
  env.proposal = proposal;
  env.result = endorsements.front().result;
  for (const Endorsement& e : endorsements) {
    env.endorsements.push_back({e.peer_id, e.org_id, e.signature});
  }
  return env;
}

Orderer::Orderer(uint64_t tip_height, const Hash32& tip_hash,
                 uint32_t max_block_size,
                 std::chrono::milliseconds batch_timeout, Clock clock)
    : max_block_size_(std::max<uint32_t>(1, max_block_size)),
      batch_timeout_(batch_timeout),
      clock_(clock ? std::move(clock)
                   : Clock([] { return std::chrono::steady_clock::now(); })),
      last_height_(tip_height),
      last_hash_(tip_hash) {}

Orderer::~Orderer() { Stop(); }

void Orderer::AddSink(Sink sink) { sinks_.push_back(std::move(sink)); }

void Orderer::Submit(TransactionEnvelope envelope) {
  bool full = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (queue_.empty()) oldest_ = clock_();
    queue_.push_back(std::move(envelope));
    full = queue_.size() >= max_block_size_;
  }
  if (running()) {
    cv_.notify_one();
  } else if (full) {
    CutBlock();
  }
}

std::optional<Block> Orderer::CutLocked() {
  if (queue_.empty()) return std::nullopt;
  Block block;
  const size_t n = std::min<size_t>(queue_.size(), max_block_size_);
  for (size_t i = 0; i < n; ++i) {
    block.transactions.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  block.header.height = ++last_height_;
  block.header.prev_hash = last_hash_;
  block.header.timestamp = Now();
  SealBlock(block);
  last_hash_ = block.header.block_hash;
  if (!queue_.empty()) oldest_ = clock_();
  return block;
}

std::optional<Block> Orderer::CutBlock() {
  std::lock_guard<std::mutex> order(deliver_mu_);
  std::optional<Block> block;
  {
    std::lock_guard<std::mutex> lock(mu_);
    block = CutLocked();
  }
  if (block) Deliver(*block);
  return block;
}

std::optional<Block> Orderer::Tick() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (queue_.empty() || clock_() - oldest_ < batch_timeout_) {
      return std::nullopt;
    }
  }
  return CutBlock();
}

void Orderer::Deliver(const Block& block) {
  for (const Sink& sink : sinks_) sink(block);
}

void Orderer::Start() {
  if (running()) return;
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = false;
  }
  worker_ = std::thread([this] { Run(); });
}

void Orderer::Stop() {
  if (!running()) return;
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void Orderer::Run() {
  std::unique_lock<std::mutex> lock(mu_);
  while (!stop_) {
    if (queue_.empty()) {
      cv_.wait(lock);
      continue;
    }
    const auto deadline = oldest_ + batch_timeout_;
    if (queue_.size() >= max_block_size_ || clock_() >= deadline) {
      lock.unlock();
      CutBlock();
      lock.lock();
      continue;
    }
    cv_.wait_until(lock, deadline);
  }
}

uint64_t Orderer::height() const {
  std::lock_guard<std::mutex> lock(mu_);
  return last_height_;
}

size_t Orderer::queued() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queue_.size();
}

Network::Network(GenesisConfig config, Block genesis, Options options)
    : config_(std::move(config)),
      genesis_(std::move(genesis)),
      options_(std::move(options)) {}

Network::~Network() {
  if (orderer_) orderer_->Stop();
}

absl::StatusOr<std::unique_ptr<Network>> Network::Create(
    const GenesisConfig& config, std::vector<PeerSpec> peers,
    Options options) {
  auto genesis = BuildGenesisBlock(config);
  if (!genesis.ok()) return genesis.status();
  if (peers.empty()) return absl::InvalidArgumentError("no peers");
  std::unique_ptr<Network> net(
      new Network(config, *std::move(genesis), std::move(options)));
  const Options& opts = net->options_;
  for (PeerSpec& spec : peers) {
    Peer::Options po;
    if (!opts.data_dir.empty()) {
      po.data_dir = (fs::path(opts.data_dir) / spec.identity.peer_id).string();
    }
    po.snapshot_interval = opts.snapshot_interval;
    auto peer = Peer::Open(std::move(spec.identity), std::move(spec.key),
                           net->genesis_, po);
    if (!peer.ok()) return peer.status();
    net->peers_.push_back(*std::move(peer));
  }

  // A peer that stopped behind the others catches up from the leader.
  Peer* leader = net->peers_.front().get();
  for (auto& p : net->peers_) {
    if (p->height() > leader->height()) leader = p.get();
  }
  for (auto& p : net->peers_) {
    for (uint64_t h = p->height() + 1; h <= leader->height(); ++h) {
      if (auto st = p->Deliver(*leader->BlockAt(h)); !st.ok()) return st;
    }
  }

  net->orderer_ = std::make_unique<Orderer>(
      leader->height(), leader->tip_hash(), config.max_block_size,
      config.batch_timeout);
  for (auto& p : net->peers_) {
    Peer* peer = p.get();
    const auto delay = opts.delivery_delay;
    net->orderer_->AddSink([peer, delay](const Block& block) {
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      if (auto st = peer->Deliver(block); !st.ok()) {
        std::fprintf(stderr, "peer %s: delivery of block %llu failed: %s\n",
                     peer->identity().peer_id.c_str(),
                     static_cast<unsigned long long>(block.header.height),
                     std::string(st.message()).c_str());
      }
    });
  }
  if (opts.threaded) net->orderer_->Start();
  return net;
}

std::vector<Peer*> Network::peers() {
  std::vector<Peer*> out;
  for (auto& p : peers_) out.push_back(p.get());
  return out;
}

absl::StatusOr<std::vector<Endorsement>> Network::CollectEndorsements(
    const Proposal& proposal, uint32_t attempt) {
  std::vector<Endorsement> out;
  for (const std::string& org : config_.endorsement_orgs) {
    auto it = std::find_if(peers_.begin(), peers_.end(), [&](const auto& p) {
      return p->identity().org_id == org;
    });
    if (it == peers_.end()) {
      return absl::FailedPreconditionError(
          absl::StrCat("PolicyUnsatisfied: no peer for ", org));
    }
    auto e = (*it)->Endorse(proposal, attempt);
    if (!e.ok()) return e.status();
    out.push_back(*std::move(e));
  }
  return out;
}

namespace {
constexpr int kEndorseRounds = 20;
}  // namespace

absl::StatusOr<TxOutcome> Network::SubmitAndWait(const Proposal& proposal) {
  for (uint32_t attempt = 0;; ++attempt) {
    TxOutcome out;
    out.tx_id = ComputeTxId(proposal, attempt);
    out.attempts = attempt + 1;
    if (gateway_peer().FindTx(out.tx_id)) {
      return absl::AlreadyExistsError(
          absl::StrCat("DuplicateTransaction: ", out.tx_id));
    }
    // Endorsers briefly disagree while one of them is still committing the
    // latest block; nothing was ordered yet, so endorse again.
    absl::StatusOr<TransactionEnvelope> env;
    for (int round = 0;; ++round) {
      auto endorsements = CollectEndorsements(proposal, attempt);
      if (!endorsements.ok()) return endorsements.status();
      out.result = endorsements->front().result;
      if (!out.result.response.ok()) return out;
      env = Assemble(proposal, attempt, *endorsements, config_.endorsement_orgs);
      if (env.ok() || env.status().code() != absl::StatusCode::kAborted ||
          round >= kEndorseRounds) {
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2 * (round + 1)));
    }
    if (!env.ok()) return env.status();

    std::future<TxStatus> committed = gateway_peer().WatchTx(out.tx_id);
    orderer_->Submit(*std::move(env));
    if (!orderer_->running()) Flush();
    if (committed.wait_for(options_.commit_timeout) !=
        std::future_status::ready) {
      return absl::DeadlineExceededError(
          absl::StrCat("transaction ", out.tx_id, " did not commit"));
    }
    TxStatus status = committed.get();
    out.submitted = true;
    out.validity = status.validity;
    out.block_height = status.block_height;
    out.tx_offset = status.tx_offset;
    out.result = std::move(status.result);
    if (out.validity != TxValidity::kInvalidMvcc) return out;
    if (attempt >= options_.mvcc_retries) {
      return absl::AbortedError(absl::StrCat(
          "MvccRetryExhausted after ", out.attempts, " attempts"));
    }
  }
}

void Network::Flush() {
  while (orderer_->CutBlock()) {
  }
}

bool Network::Converged() const {
  const Peer& first = *peers_.front();
  for (const auto& p : peers_) {
    if (p->height() != first.height() || p->tip_hash() != first.tip_hash() ||
        p->StateHash() != first.StateHash()) {
      return false;
    }
  }
  return true;
}

}  // namespace doorledger
