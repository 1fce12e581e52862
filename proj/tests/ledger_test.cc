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

#include <fstream>
#include <random>

#include "doctest.h"
#include "doorledger/ledger.h"
#include "doorledger/validation.h"
#include "support.h"

namespace doorledger {
namespace {

using chaincode::CheckAccess;
using chaincode::GrantAccess;
using testing::TempDir;

// Genesis plus one block per submission.
struct SmallChain {
  TempDir dir;
  testing::TestNet net;
  SmallChain() : net(Make(dir)) {
    HolderCard admin = net.Card("admin");
    HolderCard alice = net.Card("alice");
    net.Submit(admin, GrantAccess{"alice", "door-x1"});
    net.Submit(alice, CheckAccess{"door-x1"});
    net.Submit(alice, CheckAccess{"door-y1"});
    net.Submit(admin, GrantAccess{"bob", "door-y1"});
  }
  static testing::TestNet Make(const TempDir& dir) {
    Network::Options o;
    o.data_dir = dir.str();
    return testing::MakeTestNet(o);
  }
  std::string file() { return net.peer(0).block_file_path(); }
};

Bytes Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void Spit(const std::string& path, const Bytes& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

TEST_CASE("genesis shape") {
  auto d = testing::StandardDeployment();
  auto g = BuildGenesisBlock(d.genesis);
  REQUIRE(g.ok());
  CHECK(g->header.height == 0);
  CHECK(g->header.prev_hash == Hash32{});
  CHECK(g->header.timestamp == testing::GenesisTime());
  CHECK_FALSE(g->config.empty());
  CHECK(g->validity.size() == g->transactions.size());
  // Deterministic from the config.
  CHECK(EncodeBlock(*g) == EncodeBlock(*BuildGenesisBlock(d.genesis)));
  auto back = ReadGenesisConfig(*g);
  REQUIRE(back.ok());
  CHECK(CanonicalJson(ToJson(*back)) == CanonicalJson(ToJson(d.genesis)));
}

TEST_CASE("genesis config validation") {
  auto d = testing::StandardDeployment();
  GenesisConfig no_admin = d.genesis;
  std::erase_if(no_admin.bootstrap.participants,
                [](const Participant& p) { return p.role == Role::kAdmin; });
  CHECK_FALSE(ValidateGenesisConfig(no_admin).ok());
  GenesisConfig bad_policy = d.genesis;
  bad_policy.endorsement_orgs.insert("org9");
  CHECK_FALSE(ValidateGenesisConfig(bad_policy).ok());
  GenesisConfig bad_ceo = d.genesis;
  bad_ceo.bootstrap.departments[0].ceo_participant_id = "alice";
  CHECK_FALSE(ValidateGenesisConfig(bad_ceo).ok());
}

TEST_CASE("blocks hash-chain and round-trip through the canonical encoding") {
  SmallChain c;
  auto blocks = c.net.peer(0).Blocks();
  REQUIRE(blocks.size() == 5);
  for (size_t i = 0; i < blocks.size(); ++i) {
    CAPTURE(i);
    CHECK(blocks[i].header.height == i);
    if (i > 0) CHECK(blocks[i].header.prev_hash == blocks[i - 1].header.block_hash);
    const BlockHeader& h = blocks[i].header;
    CHECK(h.block_hash == ComputeBlockHash(h.height, h.prev_hash, h.data_hash, h.timestamp));
    Bytes enc = EncodeBlock(blocks[i]);
    auto dec = DecodeBlock(enc);
    REQUIRE(dec.ok());
    CHECK(EncodeBlock(*dec) == enc);
  }
  CHECK(VerifyChainStructure(blocks).ok);
  auto report = VerifyChain(blocks);
  CHECK(report.ok);
  CHECK(report.height == 4);
}

TEST_CASE("strict decode rejects trailing and truncated input") {
  SmallChain c;
  Bytes enc = EncodeBlock(*c.net.peer(0).BlockAt(1));
  Bytes longer = enc;
  longer.push_back(0);
  CHECK_FALSE(DecodeBlock(longer).ok());
  Bytes shorter(enc.begin(), enc.end() - 1);
  CHECK_FALSE(DecodeBlock(shorter).ok());
}

TEST_CASE("chain verification localizes semantic and structural damage") {
  SmallChain c;
  auto blocks = c.net.peer(0).Blocks();

  SUBCASE("validity flag flipped") {
    blocks[2].validity[0] = TxValidity::kInvalidMvcc;
    auto r = VerifyChain(blocks);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_height == 2);
  }
  SUBCASE("timestamp changed") {
    blocks[3].header.timestamp += std::chrono::milliseconds(1);
    auto r = VerifyChain(blocks);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_height == 3);
  }
  SUBCASE("block removed") {
    blocks.erase(blocks.begin() + 2);
    auto r = VerifyChain(blocks);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_height == 2);
  }
  SUBCASE("resealed block with a forged response breaks the next link") {
    blocks[1].transactions[0].result.response.message = "forged";
    SealBlock(blocks[1]);
    auto r = VerifyChain(blocks);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_height <= 2);
  }
}

TEST_CASE("block file tamper is caught at or before the mutated block") {
  SmallChain c;
  const std::string path = c.file();
  Bytes pristine = Slurp(path);
  CHECK(VerifyBlockFile(path).ok);
  auto frames = BlockFile::SplitFrames(pristine);
  REQUIRE(frames.ok());
  REQUIRE(frames->size() == 5);

  TempDir scratch;
  const std::string copy = (scratch.path() / "blocks.dat").string();
  std::mt19937_64 rng(3);
  size_t start = 0;
  for (size_t b = 0; b < frames->size(); ++b) {
    const size_t body = start + 4;
    const size_t len = (*frames)[b].size();
    for (int k = 0; k < 10; ++k) {
      Bytes bad = pristine;
      size_t pos = body + rng() % len;
      bad[pos] ^= static_cast<uint8_t>(1 + rng() % 255);
      Spit(copy, bad);
      auto r = VerifyBlockFile(copy);
      CAPTURE(b);
      CAPTURE(pos);
      CHECK_FALSE(r.ok);
      REQUIRE(r.first_bad_height.has_value());
      CHECK(*r.first_bad_height <= b);
    }
    start = body + len;
  }

  Bytes truncated(pristine.begin(), pristine.end() - 3);
  Spit(copy, truncated);
  CHECK_FALSE(VerifyBlockFile(copy).ok);

  // Every bit of every length prefix: blamed on that frame or earlier.
  start = 0;
  for (size_t b = 0; b < frames->size(); ++b) {
    for (size_t byte = 0; byte < 4; ++byte) {
      for (int bit = 0; bit < 8; ++bit) {
        Bytes bad = pristine;
        bad[start + byte] ^= static_cast<uint8_t>(1u << bit);
        Spit(copy, bad);
        auto r = VerifyBlockFile(copy);
        CAPTURE(b);
        CAPTURE(byte);
        CAPTURE(bit);
        CHECK_FALSE(r.ok);
        REQUIRE(r.first_bad_height.has_value());
        CHECK(*r.first_bad_height <= b);
      }
    }
    start += 4 + (*frames)[b].size();
  }
}

TEST_CASE("replay reproduces the peer's world state") {
  SmallChain c;
  auto state = Replay(c.net.peer(0).Blocks());
  REQUIRE(state.ok());
  CHECK(state->Hash() == c.net.peer(0).StateHash());
  CHECK(*state == *c.net.peer(1).state());
}

TEST_CASE("world state hash and snapshot") {
  WorldState a;
  WorldState b;
  a.Apply("k1", "1", {1, 0});
  a.Apply("k2", "2", {1, 1});
  b.Apply("k2", "2", {1, 1});
  b.Apply("k1", "1", {1, 0});
  CHECK(a.Hash() == b.Hash());
  b.Apply("k1", "1", {2, 0});
  CHECK(a.Hash() != b.Hash());
  b.Apply("k3", std::nullopt, {3, 0});
  CHECK(b.size() == 2);
  b.Apply("k1", std::nullopt, {3, 1});
  CHECK_FALSE(b.Read("k1").has_value());

  a.Apply("p/a", "{}", {1, 2});
  a.Apply("p/b", "{}", {1, 3});
  a.Apply("q/a", "{}", {1, 4});
  auto range = a.RangeRead("p/");
  REQUIRE(range.size() == 2);
  CHECK(range[0].first == "p/a");

  auto back = WorldState::FromSnapshotJson(a.ToSnapshotJson());
  REQUIRE(back.ok());
  CHECK(*back == a);
  CHECK(back->Hash() == a.Hash());
}

TEST_CASE("CheckSuccessor") {
  SmallChain c;
  auto b1 = *c.net.peer(0).BlockAt(1);
  auto b2 = *c.net.peer(0).BlockAt(2);
  auto g = *c.net.peer(0).BlockAt(0);
  CHECK(CheckSuccessor(nullptr, g).ok());
  CHECK(CheckSuccessor(&b1.header, b2).ok());
  CHECK_FALSE(CheckSuccessor(&g.header, b2).ok());
  CHECK_FALSE(CheckSuccessor(nullptr, b1).ok());
}

HistorianRecord Rec(std::string id, std::string type, std::string who, int64_t ms) {
  HistorianRecord r;
  r.tx_id = std::move(id);
  r.transaction_type = std::move(type);
  r.participant_id = std::move(who);
  r.timestamp = FromMillis(ms);
  return r;
}

TEST_CASE("historian filters and limit keeps the newest in commit order") {
  Historian h;
  h.Append(Rec("t1", "GrantAccess", "admin", 1000));
  h.Append(Rec("t2", "CheckAccess", "alice", 2000));
  h.Append(Rec("t3", "CheckAccess", "bob", 3000));
  h.Append(Rec("t4", "CheckAccess", "alice", 4000));
  h.Append(Rec("t5", "RevokeAccess", "admin", 5000));

  auto ids = [](const std::vector<HistorianRecord>& rs) {
    std::vector<std::string> out;
    for (const auto& r : rs) out.push_back(r.tx_id);
    return out;
  };
  CHECK(ids(h.Query({})).size() == 5);
  HistorianFilter f;
  f.participant_id = "alice";
  CHECK(ids(h.Query(f)) == std::vector<std::string>{"t2", "t4"});
  f = {};
  f.transaction_type = "CheckAccess";
  f.limit = 2;
  CHECK(ids(h.Query(f)) == std::vector<std::string>{"t3", "t4"});
  f = {};
  f.from = FromMillis(2000);
  f.to = FromMillis(4000);
  CHECK(ids(h.Query(f)) == std::vector<std::string>{"t2", "t3", "t4"});
  f.limit = 0;
  CHECK(h.Query(f).empty());

  auto back = HistorianRecordFromJson(ToJson(h.Query({})[1]));
  REQUIRE(back.ok());
  CHECK(back->tx_id == "t2");
  Json j = ToJson(h.Query({})[1]);
  for (const char* field : {"txId", "transactionType", "participantId", "timestamp"}) {
    CHECK(j.contains(field));
  }
}

TEST_CASE("historian holds one record per committed transaction") {
  SmallChain c;
  size_t txs = 0;
  for (const Block& b : c.net.peer(0).Blocks()) txs += b.transactions.size();
  CHECK(c.net.peer(0).historian().size() == txs);
  HistorianFilter f;
  f.participant_id = "alice";
  auto mine = c.net.peer(0).historian().Query(f);
  REQUIRE(mine.size() == 2);
  CHECK(mine[0].transaction_type == "CheckAccess");
  REQUIRE(mine[0].decision.has_value());
  CHECK(mine[0].decision->outcome == acl::Operation::kAllow);
  CHECK(mine[1].decision->outcome == acl::Operation::kDeny);
}

}  // namespace
}  // namespace doorledger
