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

#include "doorledger/genesis.h"

#include <algorithm>
#include <map>

#include "absl/strings/str_cat.h"

namespace doorledger {
namespace {

absl::Status Bootstrap(const std::string& why) {
  return absl::InvalidArgumentError(absl::StrCat("InvalidBootstrap: ", why));
}

TransactionEnvelope GenesisTx(chaincode::TransactionPayload payload,
                              const std::string& key, const Json& value,
                              Timestamp at) {
  TransactionEnvelope env;
  env.proposal.payload = std::move(payload);
  env.proposal.card.card_id = "genesis";
  env.proposal.card.participant_id = "genesis";
  env.proposal.card.issued_at = at;
  env.proposal.proposed_at = at;
  env.tx_id = ComputeTxId(env.proposal, 0);
  env.result.rwset.writes.push_back({key, CanonicalJson(value)});
  return env;
}

}  // namespace

Json ToJson(const GenesisConfig& c) {
  Json peers = Json::array();
  for (const PeerIdentity& p : c.peers) {
    peers.push_back({{"peerId", p.peer_id},
                     {"orgId", p.org_id},
                     {"publicKey", ToBase64(p.public_key.bytes)}});
  }
  Json rules = Json::array();
  for (const auto& r : c.rules) rules.push_back(acl::ToJson(r));
  Json participants = Json::array();
  for (const auto& p : c.bootstrap.participants) participants.push_back(ToJson(p));
  Json departments = Json::array();
  for (const auto& d : c.bootstrap.departments) departments.push_back(ToJson(d));
  Json places = Json::array();
  for (const auto& p : c.bootstrap.places) places.push_back(ToJson(p));
  return {{"networkName", c.network_name},
          {"genesisTime", FormatRfc3339(c.genesis_time)},
          {"caPublicKey", ToBase64(c.ca_public_key.bytes)},
          {"peers", peers},
          {"endorsementOrgs", c.endorsement_orgs},
          {"maxBlockSize", c.max_block_size},
          {"batchTimeoutMs", c.batch_timeout.count()},
          {"intrusionThreshold", c.intrusion_threshold},
          {"rules", rules},
          {"bootstrap",
           {{"participants", participants},
            {"departments", departments},
            {"places", places}}}};
}

absl::StatusOr<GenesisConfig> GenesisConfigFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("config object");
  GenesisConfig c;
  try {
    c.network_name = j.at("networkName").get<std::string>();
    auto t = ParseRfc3339(j.at("genesisTime").get<std::string>());
    if (!t.ok()) return t.status();
    c.genesis_time = *t;
    auto ca = FromBase64(j.at("caPublicKey").get<std::string>());
    if (!ca.ok()) return ca.status();
    c.ca_public_key.bytes = *ca;
    for (const Json& p : j.at("peers")) {
      auto key = FromBase64(p.at("publicKey").get<std::string>());
      if (!key.ok()) return key.status();
      c.peers.push_back({p.at("peerId").get<std::string>(),
                         p.at("orgId").get<std::string>(),
                         PublicKey{*key}});
    }
    for (const Json& o : j.at("endorsementOrgs")) {
      c.endorsement_orgs.insert(o.get<std::string>());
    }
    c.max_block_size = j.at("maxBlockSize").get<uint32_t>();
    c.batch_timeout = std::chrono::milliseconds(j.at("batchTimeoutMs").get<int64_t>());
    c.intrusion_threshold = j.at("intrusionThreshold").get<uint32_t>();
    auto rules = acl::RulesFromJson(j.at("rules"));
    if (!rules.ok()) return rules.status();
    c.rules = *std::move(rules);
    const Json& b = j.at("bootstrap");
    for (const Json& p : b.at("participants")) {
      auto v = ParticipantFromJson(p);
      if (!v.ok()) return v.status();
      c.bootstrap.participants.push_back(*v);
    }
    for (const Json& d : b.at("departments")) {
      auto v = DepartmentFromJson(d);
      if (!v.ok()) return v.status();
      c.bootstrap.departments.push_back(*v);
    }
    for (const Json& p : b.at("places")) {
      auto v = PlaceFromJson(p);
      if (!v.ok()) return v.status();
      c.bootstrap.places.push_back(*v);
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("genesis config: ", e.what()));
  }
  return c;
}

absl::Status ValidateGenesisConfig(const GenesisConfig& c) {
  const auto& ps = c.bootstrap.participants;
  if (std::none_of(ps.begin(), ps.end(),
                   [](const Participant& p) { return p.role == Role::kAdmin; })) {
    return Bootstrap("no Admin participant");
  }
  if (c.peers.empty()) return Bootstrap("no peers");
  if (c.endorsement_orgs.empty()) return Bootstrap("empty endorsement policy");
  for (const std::string& org : c.endorsement_orgs) {
    if (std::none_of(c.peers.begin(), c.peers.end(),
                     [&](const PeerIdentity& p) { return p.org_id == org; })) {
      return Bootstrap(absl::StrCat("policy org without peer: ", org));
    }
  }
  if (c.max_block_size < 1) return Bootstrap("maxBlockSize must be >= 1");
  if (c.batch_timeout.count() <= 0) return Bootstrap("batchTimeout must be > 0");
  if (c.intrusion_threshold < 1) return Bootstrap("intrusion threshold >= 1");
  if (c.ca_public_key.bytes.size() != 32) return Bootstrap("CA public key");
  std::set<std::string> peer_ids;
  for (const PeerIdentity& p : c.peers) {
    if (!peer_ids.insert(p.peer_id).second) {
      return Bootstrap(absl::StrCat("duplicate peer ", p.peer_id));
    }
  }
  std::map<std::string, const Participant*> by_id;
  for (const Participant& p : ps) {
    if (auto st = ValidateParticipant(p); !st.ok()) return Bootstrap(std::string(st.message()));
    if (!by_id.emplace(p.participant_id, &p).second) {
      return Bootstrap(absl::StrCat("duplicate participant ", p.participant_id));
    }
  }
  std::set<std::string> depts;
  for (const Department& d : c.bootstrap.departments) {
    if (!depts.insert(d.department_id).second) {
      return Bootstrap(absl::StrCat("duplicate department ", d.department_id));
    }
    auto it = by_id.find(d.ceo_participant_id);
    if (it == by_id.end() || it->second->role != Role::kCeo ||
        it->second->department_id != d.department_id) {
      return Bootstrap(absl::StrCat("department ", d.department_id,
                                    " needs a CEO of that department"));
    }
  }
  std::set<std::string> places;
  for (const PhysicalPlace& p : c.bootstrap.places) {
    if (!places.insert(p.place_id).second) {
      return Bootstrap(absl::StrCat("duplicate place ", p.place_id));
    }
    if (!depts.contains(p.department_id)) {
      return Bootstrap(absl::StrCat("place ", p.place_id,
                                    " references unknown department"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Block> BuildGenesisBlock(const GenesisConfig& config) {
  if (auto st = ValidateGenesisConfig(config); !st.ok()) return st;
  Block block;
  block.header.height = 0;
  block.header.timestamp = config.genesis_time;
  block.config = CanonicalJson(ToJson(config));
  const Timestamp at = config.genesis_time;
  for (const Participant& p : config.bootstrap.participants) {
    block.transactions.push_back(
        GenesisTx(chaincode::RegisterParticipant{p},
                  chaincode::keys::Participant(p.participant_id), ToJson(p), at));
  }
  for (const Department& d : config.bootstrap.departments) {
    block.transactions.push_back(
        GenesisTx(chaincode::RegisterDepartment{d},
                  chaincode::keys::Department(d.department_id), ToJson(d), at));
  }
  for (const PhysicalPlace& p : config.bootstrap.places) {
    block.transactions.push_back(GenesisTx(
        chaincode::RegisterPlace{p}, chaincode::keys::Place(p.place_id),
        ToJson(p), at));
  }
  block.validity.assign(block.transactions.size(), TxValidity::kValid);
  SealBlock(block);
  return block;
}

absl::StatusOr<GenesisConfig> ReadGenesisConfig(const Block& genesis) {
  if (genesis.header.height != 0) {
    return absl::InvalidArgumentError("not a genesis block");
  }
  auto j = ParseJson(genesis.config);
  if (!j.ok()) return j.status();
  return GenesisConfigFromJson(*j);
}

chaincode::ChainConfig ToChainConfig(const GenesisConfig& config) {
  return {config.rules, config.intrusion_threshold, config.max_block_size};
}

std::vector<acl::AclRule> DefaultRules() {
  using acl::Action;
  using acl::Condition;
  using acl::Operation;
  return {
      {"admin-all", {Role::kAdmin}, "*",
       {Action::kCreate, Action::kRead, Action::kUpdate, Action::kDelete},
       Operation::kAllow, Condition::Always()},
      {"ceo-own-department", {Role::kCeo}, "*", {Action::kRead},
       Operation::kAllow, Condition::DepartmentMatch()},
      {"manager-office-hours", {Role::kManager}, "*", {Action::kRead},
       Operation::kAllow, Condition::TimeWindow(7 * 60, 22 * 60)},
  };
}

}  // namespace doorledger
