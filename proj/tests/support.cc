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

#include "support.h"

#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "absl/strings/str_cat.h"

namespace doorledger::testing {

SigningKey KeyFor(std::string_view label) {
  Hash32 seed = Sha256(absl::StrCat("doorledger-test-key:", std::string(label)));
  return SigningKeyFromSeed(seed);
}

Timestamp GenesisTime() { return FromMillis(1767225600000); }

BootstrapEntities StandardBootstrap() {
  BootstrapEntities b;
  b.participants = {
      {"admin", "Administrator", Role::kAdmin, std::nullopt},
      {"ceo-x", "CEO X", Role::kCeo, "dept-x"},
      {"ceo-y", "CEO Y", Role::kCeo, "dept-y"},
      {"manager", "Manager", Role::kManager, "dept-x"},
      {"alice", "Alice", Role::kEmployee, "dept-x"},
      {"bob", "Bob", Role::kEmployee, "dept-x"},
      {"carol", "Carol", Role::kEmployee, "dept-x"},
  };
  b.departments = {{"dept-x", "Dept X", "ceo-x"}, {"dept-y", "Dept Y", "ceo-y"}};
  b.places = {{"door-x1", "X main", "dept-x"},
              {"door-x2", "X lab", "dept-x"},
              {"door-y1", "Y main", "dept-y"}};
  return b;
}

Deployment StandardDeployment(uint32_t max_block_size,
                              std::chrono::milliseconds batch_timeout) {
  Deployment d;
  d.ca = KeyFor("ca");
  GenesisConfig& g = d.genesis;
  g.network_name = "test-network";
  g.genesis_time = GenesisTime();
  g.ca_public_key = d.ca.public_key;
  for (const char* org : {"org1", "org2"}) {
    std::string id = absl::StrCat("peer0.", org);
    SigningKey key = KeyFor(id);
    g.peers.push_back({id, org, key.public_key});
    d.peers.push_back({g.peers.back(), key});
  }
  g.endorsement_orgs = {"org1", "org2"};
  g.max_block_size = max_block_size;
  g.batch_timeout = batch_timeout;
  g.intrusion_threshold = 3;
  g.rules = DefaultRules();
  g.bootstrap = StandardBootstrap();
  return d;
}

HolderCard TestNet::Card(const std::string& participant_id) const {
  auto state = network->gateway_peer().state();
  auto card = IssueCard(participant_id, deployment.ca, [&](std::string_view id) {
    return state->Read(chaincode::keys::Participant(id)).has_value();
  });
  if (!card.ok()) throw std::runtime_error(std::string(card.status().message()));
  return *std::move(card);
}

TxOutcome TestNet::Submit(const HolderCard& card, chaincode::TransactionPayload payload) {
  auto out = network->SubmitAndWait(MakeProposal(card, std::move(payload)));
  if (!out.ok()) throw std::runtime_error(std::string(out.status().ToString()));
  return *std::move(out);
}

TestNet MakeTestNet(Network::Options options, Deployment deployment) {
  auto net = Network::Create(deployment.genesis, deployment.peers, options);
  if (!net.ok()) throw std::runtime_error(net.status().ToString());
  return TestNet{std::move(deployment), *std::move(net)};
}

bool AwaitConvergence(Network& network, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (!network.Converged()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return true;
}

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "doorledger-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace doorledger::testing
