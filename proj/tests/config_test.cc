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

#include "doctest.h"
#include "doorledger/config.h"
#include "support.h"

namespace doorledger {
namespace {

namespace fs = std::filesystem;

void Write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

InitOptions Opts(const testing::TempDir& dir) {
  InitOptions o;
  o.dir = dir.str();
  o.listen_port = 18080;
  o.genesis_time = testing::GenesisTime();
  return o;
}

TEST_CASE("init then load a node config") {
  testing::TempDir dir;
  auto init = InitDeployment(Opts(dir));
  REQUIRE(init.ok());
  auto node = LoadNodeConfig(init->config_path);
  REQUIRE(node.ok());
  CHECK(node->genesis.network_name == "physical-access-network");
  CHECK(node->genesis.genesis_time == testing::GenesisTime());
  CHECK(node->genesis.max_block_size == 10);
  CHECK(node->genesis.batch_timeout == std::chrono::milliseconds(1000));
  CHECK(node->genesis.endorsement_orgs == std::set<std::string>{"org1", "org2"});
  CHECK(node->peers.size() == 2);
  CHECK(node->listen_port == 18080);
  CHECK(node->data_dir == (dir.path() / "data").string());
  CHECK_FALSE(node->webhook_url.has_value());
  CHECK(node->genesis.rules == DefaultRules());
  CHECK(ValidateGenesisConfig(node->genesis).ok());
  CHECK(BuildGenesisBlock(node->genesis).ok());

  auto card = LoadCardFile(init->admin_card_path);
  REQUIRE(card.ok());
  CHECK(card->card.participant_id == "admin");
  CHECK(VerifyCard(card->card, node->ca_key.public_key));
  CHECK(card->gateway == "http://127.0.0.1:18080");

  auto bench = LoadBenchConfig(init->config_path);
  REQUIRE(bench.ok());
  CHECK(bench->total_transactions == 500);
  CHECK(bench->send_rate == 10);
  CHECK(bench->preset == bench::Preset::kNonConflicting);
  CHECK(bench->mix.check == doctest::Approx(0.7));
}

TEST_CASE("init refuses to overwrite") {
  testing::TempDir dir;
  REQUIRE(InitDeployment(Opts(dir)).ok());
  CHECK(InitDeployment(Opts(dir)).status().code() == absl::StatusCode::kAlreadyExists);
}

TEST_CASE("two inits produce different keys") {
  testing::TempDir a, b;
  auto ia = InitDeployment(Opts(a));
  auto ib = InitDeployment(Opts(b));
  REQUIRE(ia.ok());
  REQUIRE(ib.ok());
  CHECK(LoadNodeConfig(ia->config_path)->ca_key.public_key !=
        LoadNodeConfig(ib->config_path)->ca_key.public_key);
}

TEST_CASE("signing keys round trip with owner-only permissions") {
  testing::TempDir dir;
  const std::string path = (dir.path() / "k.key").string();
  SigningKey key = testing::KeyFor("round-trip");
  REQUIRE(SaveSigningKey(path, key).ok());
  auto back = LoadSigningKey(path);
  REQUIRE(back.ok());
  CHECK(back->public_key == key.public_key);
  CHECK((fs::status(path).permissions() & fs::perms::group_all) == fs::perms::none);
  CHECK((fs::status(path).permissions() & fs::perms::others_all) == fs::perms::none);

  Write(dir.path() / "bad.key", "not base64 !!\n");
  CHECK_FALSE(LoadSigningKey((dir.path() / "bad.key").string()).ok());
  CHECK_FALSE(LoadSigningKey((dir.path() / "missing.key").string()).ok());
}

TEST_CASE("standalone bench file") {
  testing::TempDir dir;
  const fs::path p = dir.path() / "bench.toml";
  Write(p, R"(name = "conflict-run"
total_transactions = 20
send_rate = 5.0
client_count = 2
preset = "conflict"

[mix]
check = 0.0
grant = 0.5
revoke = 0.5
)");
  auto c = LoadBenchConfig(p.string());
  REQUIRE(c.ok());
  CHECK(c->name == "conflict-run");
  CHECK(c->total_transactions == 20);
  CHECK(c->client_count == 2);
  CHECK(c->places_per_client == 10);
  CHECK(c->preset == bench::Preset::kConflict);

  Write(p, "[mix]\ncheck = 0.5\ngrant = 0.1\nrevoke = 0.1\n");
  CHECK(LoadBenchConfig(p.string()).status().code() == absl::StatusCode::kInvalidArgument);
  Write(p, "preset = \"sideways\"\n");
  CHECK_FALSE(LoadBenchConfig(p.string()).ok());
  Write(p, "name = [unterminated\n");
  CHECK_FALSE(LoadBenchConfig(p.string()).ok());
  CHECK(LoadBenchConfig((dir.path() / "nope.toml").string()).status().code() ==
        absl::StatusCode::kNotFound);
}

TEST_CASE("node config errors") {
  testing::TempDir dir;
  auto init = InitDeployment(Opts(dir));
  REQUIRE(init.ok());
  std::ifstream in(init->config_path);
  std::string text((std::istreambuf_iterator<char>(in)), {});

  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    auto at = t.find(from);
    REQUIRE(at != std::string::npos);
    t.replace(at, from.size(), to);
    const fs::path p = dir.path() / "variant.toml";
    Write(p, t);
    return LoadNodeConfig(p.string());
  };
  CHECK_FALSE(with("listen = \"127.0.0.1:18080\"", "listen = \"nope\"").ok());
  CHECK_FALSE(with("ca_key = \"keys/ca.key\"", "ca_key = \"keys/missing.key\"").ok());
  CHECK_FALSE(with("max_block_size = 10", "max_block_size = 0").ok());
  CHECK_FALSE(with("role = \"Admin\"", "role = \"Employee\"").ok());
  auto hooked = with("webhook = \"\"", "webhook = \"http://127.0.0.1:9/alerts\"");
  REQUIRE(hooked.ok());
  CHECK(hooked->webhook_url == "http://127.0.0.1:9/alerts");
  CHECK(LoadNodeConfig((dir.path() / "absent.toml").string()).status().code() ==
        absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace doorledger
