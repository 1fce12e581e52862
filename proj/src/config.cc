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

#include "doorledger/config.h"

#include <filesystem>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "toml.hpp"

namespace doorledger {
namespace fs = std::filesystem;

namespace {

absl::Status Invalid(std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("config: ", std::string(what)));
}

std::string Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

template <typename View>
absl::StatusOr<std::string> RequireStr(const View& n, std::string_view name) {
  auto v = n.template value<std::string>();
  if (!v || v->empty()) return Invalid(absl::StrCat("missing ", std::string(name)));
  return *v;
}

absl::StatusOr<bench::BenchConfig> BenchFromTable(const toml::table* t) {
  bench::BenchConfig c;
  if (t == nullptr) return c;
  const toml::table& b = *t;
  c.name = b["name"].value_or(c.name);
  c.total_transactions =
      b["total_transactions"].value_or<int64_t>(c.total_transactions);
  c.send_rate = b["send_rate"].value_or(c.send_rate);
  c.client_count = b["client_count"].value_or<int64_t>(c.client_count);
  c.places_per_client =
      b["places_per_client"].value_or<int64_t>(c.places_per_client);
  c.seed = b["seed"].value_or<int64_t>(static_cast<int64_t>(c.seed));
  if (auto preset = b["preset"].value<std::string>()) {
    auto p = bench::ParsePreset(*preset);
    if (!p.ok()) return p.status();
    c.preset = *p;
  }
  if (const toml::table* mix = b["mix"].as_table()) {
    c.mix.check = (*mix)["check"].value_or(0.0);
    c.mix.grant = (*mix)["grant"].value_or(0.0);
    c.mix.revoke = (*mix)["revoke"].value_or(0.0);
  }
  if (auto st = bench::ValidateBenchConfig(c); !st.ok()) return st;
  return c;
}

absl::Status ParseListen(const std::string& listen, NodeConfig& c) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos) return Invalid("listen must be host:port");
  c.listen_host = listen.substr(0, colon);
  try {
    c.listen_port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    return Invalid(absl::StrCat("bad port in ", listen));
  }
  if (c.listen_port < 0 || c.listen_port > 65535) {
    return Invalid(absl::StrCat("bad port in ", listen));
  }
  return absl::OkStatus();
}

absl::StatusOr<NodeConfig> FromToml(const toml::table& doc, const fs::path& base) {
  NodeConfig c;
  GenesisConfig& g = c.genesis;
  auto net = doc["network"];
  g.network_name = net["name"].value_or(g.network_name);
  auto gt = RequireStr(net["genesis_time"], "network.genesis_time");
  if (!gt.ok()) return gt.status();
  auto t = ParseRfc3339(*gt);
  if (!t.ok()) return t.status();
  g.genesis_time = *t;

  auto ca_path = RequireStr(net["ca_key"], "network.ca_key");
  if (!ca_path.ok()) return ca_path.status();
  auto ca = LoadSigningKey(Resolve(base, *ca_path));
  if (!ca.ok()) return ca.status();
  c.ca_key = *std::move(ca);
  g.ca_public_key = c.ca_key.public_key;

  if (auto rules = net["rules"].value<std::string>()) {
    auto r = acl::LoadRuleFile(Resolve(base, *rules));
    if (!r.ok()) return r.status();
    g.rules = *std::move(r);
  } else {
    g.rules = DefaultRules();
  }
  g.intrusion_threshold =
      net["intrusion_threshold"].value_or<int64_t>(g.intrusion_threshold);
  c.data_dir = Resolve(base, net["data_dir"].value_or(std::string("data")));

  const toml::array* peers = net["peers"].as_array();
  if (peers == nullptr || peers->empty()) return Invalid("no [[network.peers]]");
  for (const toml::node& n : *peers) {
    const toml::table* p = n.as_table();
    if (p == nullptr) return Invalid("peer entry must be a table");
    auto id = RequireStr((*p)["id"], "peer id");
    auto org = RequireStr((*p)["org"], "peer org");
    auto key_path = RequireStr((*p)["key"], "peer key");
    if (!id.ok()) return id.status();
    if (!org.ok()) return org.status();
    if (!key_path.ok()) return key_path.status();
    auto key = LoadSigningKey(Resolve(base, *key_path));
    if (!key.ok()) return key.status();
    g.peers.push_back({*id, *org, key->public_key});
    c.peers.push_back({g.peers.back(), *std::move(key)});
  }

  auto ord = doc["orderer"];
  g.max_block_size = ord["max_block_size"].value_or<int64_t>(g.max_block_size);
  g.batch_timeout = std::chrono::milliseconds(
      ord["batch_timeout_ms"].value_or<int64_t>(g.batch_timeout.count()));

  if (const toml::array* orgs = doc["endorsement"]["orgs"].as_array()) {
    for (const toml::node& o : *orgs) {
      auto s = o.value<std::string>();
      if (!s) return Invalid("endorsement.orgs must be strings");
      g.endorsement_orgs.insert(*s);
    }
  } else {
    for (const PeerIdentity& p : g.peers) g.endorsement_orgs.insert(p.org_id);
  }

  auto boot = doc["bootstrap"];
  if (const toml::array* ps = boot["participants"].as_array()) {
    for (const toml::node& n : *ps) {
      const toml::table* p = n.as_table();
      if (p == nullptr) return Invalid("participant entry must be a table");
      Participant part;
      part.participant_id = (*p)["id"].value_or(std::string());
      part.display_name = (*p)["name"].value_or(std::string());
      auto role = ParseRole((*p)["role"].value_or(std::string()));
      if (!role.ok()) return role.status();
      part.role = *role;
      if (auto d = (*p)["department"].value<std::string>()) part.department_id = *d;
      if (auto st = ValidateParticipant(part); !st.ok()) return st;
      g.bootstrap.participants.push_back(std::move(part));
    }
  }
  if (const toml::array* ds = boot["departments"].as_array()) {
    for (const toml::node& n : *ds) {
      const toml::table* d = n.as_table();
      if (d == nullptr) return Invalid("department entry must be a table");
      g.bootstrap.departments.push_back({(*d)["id"].value_or(std::string()),
                                         (*d)["name"].value_or(std::string()),
                                         (*d)["ceo"].value_or(std::string())});
    }
  }
  if (const toml::array* ps = boot["places"].as_array()) {
    for (const toml::node& n : *ps) {
      const toml::table* p = n.as_table();
      if (p == nullptr) return Invalid("place entry must be a table");
      g.bootstrap.places.push_back(
          {(*p)["id"].value_or(std::string()),
           (*p)["description"].value_or(std::string()),
           (*p)["department"].value_or(std::string())});
    }
  }
  if (auto st = ValidateGenesisConfig(g); !st.ok()) return st;

  auto gw = doc["gateway"];
  if (auto st = ParseListen(gw["listen"].value_or(std::string("127.0.0.1:8080")), c);
      !st.ok()) {
    return st;
  }
  if (auto hook = gw["webhook"].value<std::string>(); hook && !hook->empty()) {
    c.webhook_url = *hook;
  }
  c.mvcc_retries = gw["mvcc_retries"].value_or<int64_t>(c.mvcc_retries);
  c.max_clock_skew =
      std::chrono::seconds(gw["max_clock_skew_s"].value_or<int64_t>(300));

  auto bench = BenchFromTable(doc["bench"].as_table());
  if (!bench.ok()) return bench.status();
  c.bench = *std::move(bench);
  return c;
}

absl::StatusOr<toml::table> ParseTomlFile(const std::string& path) {
  try {
    return toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", std::string(e.description())));
  }
}

}  // namespace

absl::StatusOr<NodeConfig> LoadNodeConfig(const std::string& path) {
  if (!fs::exists(path)) return absl::NotFoundError(absl::StrCat("no config at ", path));
  auto doc = ParseTomlFile(path);
  if (!doc.ok()) return doc.status();
  return FromToml(*doc, fs::absolute(path).parent_path());
}

absl::StatusOr<bench::BenchConfig> LoadBenchConfig(const std::string& path) {
  if (!fs::exists(path)) return absl::NotFoundError(absl::StrCat("no config at ", path));
  auto doc = ParseTomlFile(path);
  if (!doc.ok()) return doc.status();
  if (const toml::table* b = (*doc)["bench"].as_table()) return BenchFromTable(b);
  return BenchFromTable(&*doc);
}

absl::Status SaveSigningKey(const std::string& path, const SigningKey& key) {
  if (auto st = WriteFile(path, ToBase64(key.secret) + "\n"); !st.ok()) return st;
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write,
                  fs::perm_options::replace);
  return absl::OkStatus();
}

absl::StatusOr<SigningKey> LoadSigningKey(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::string s = *text;
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) {
    s.pop_back();
  }
  auto secret = FromBase64(s);
  if (!secret.ok()) return absl::InvalidArgumentError(absl::StrCat("key file ", path));
  return SigningKeyFromSecret(*secret);
}

absl::StatusOr<InitResult> InitDeployment(const InitOptions& o) {
  const fs::path dir(o.dir);
  if (fs::exists(dir / "config.toml")) {
    return absl::AlreadyExistsError(
        absl::StrCat((dir / "config.toml").string(), " already exists"));
  }
  std::error_code ec;
  fs::create_directories(dir / "keys", ec);
  if (ec) return absl::InternalError(absl::StrCat("mkdir: ", ec.message()));

  SigningKey ca = GenerateSigningKey();
  if (auto st = SaveSigningKey((dir / "keys/ca.key").string(), ca); !st.ok()) return st;
  const std::vector<std::pair<std::string, std::string>> peers = {
      {"peer0.org1", "org1"}, {"peer0.org2", "org2"}};
  for (const auto& [id, org] : peers) {
    auto st = SaveSigningKey((dir / "keys" / (id + ".key")).string(),
                             GenerateSigningKey());
    if (!st.ok()) return st;
  }
  Json rules = Json::array();
  for (const acl::AclRule& r : DefaultRules()) rules.push_back(acl::ToJson(r));
  if (auto st = WriteFile((dir / "rules.json").string(), rules.dump(2) + "\n");
      !st.ok()) {
    return st;
  }

  std::string toml = absl::StrFormat(
      R"([network]
name = "%s"
genesis_time = "%s"
ca_key = "keys/ca.key"
rules = "rules.json"
intrusion_threshold = 3
data_dir = "data"

)",
      o.network_name, FormatRfc3339(o.genesis_time));
  for (const auto& [id, org] : peers) {
    absl::StrAppend(&toml, "[[network.peers]]\nid = \"", id, "\"\norg = \"", org,
                    "\"\nkey = \"keys/", id, ".key\"\n\n");
  }
  absl::StrAppend(&toml, R"([orderer]
max_block_size = 10
batch_timeout_ms = 1000

[endorsement]
orgs = ["org1", "org2"]

[[bootstrap.participants]]
id = ")", o.admin_id, R"("
name = "Administrator"
role = "Admin"

[gateway]
listen = "127.0.0.1:)", o.listen_port, R"("
webhook = ""
mvcc_retries = 3
max_clock_skew_s = 300

[bench]
name = "access-control"
total_transactions = 500
send_rate = 10.0
client_count = 10
places_per_client = 10
seed = 1
preset = "non-conflicting"

[bench.mix]
check = 0.7
grant = 0.2
revoke = 0.1
)");
  const std::string config_path = (dir / "config.toml").string();
  if (auto st = WriteFile(config_path, toml); !st.ok()) return st;

  const std::string admin = o.admin_id;
  auto card = IssueCard(
      admin, ca, [&](std::string_view id) { return id == admin; },
      o.genesis_time);
  if (!card.ok()) return card.status();
  card->gateway = absl::StrCat("http://127.0.0.1:", o.listen_port);
  const std::string card_path = (dir / (admin + ".card")).string();
  if (auto st = SaveCardFile(card_path, *card); !st.ok()) return st;
  return InitResult{config_path, card_path};
}

}  // namespace doorledger
