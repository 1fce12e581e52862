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

// Shared fixtures: a deterministic two-org network with two departments.
//
//   admin                      Admin
//   ceo-x / ceo-y              CEO of dept-x / dept-y
//   manager                    Manager of dept-x
//   alice, bob, carol          Employees of dept-x
//   door-x1, door-x2 / door-y1 places in dept-x / dept-y

#ifndef DOORLEDGER_TESTS_SUPPORT_H_
#define DOORLEDGER_TESTS_SUPPORT_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "doorledger/genesis.h"
#include "doorledger/network.h"

namespace doorledger::testing {

SigningKey KeyFor(std::string_view label);

// Fixed genesis time, 2026-01-01T00:00:00Z.
Timestamp GenesisTime();

BootstrapEntities StandardBootstrap();

struct Deployment {
  SigningKey ca;
  GenesisConfig genesis;
  std::vector<PeerSpec> peers;
};

Deployment StandardDeployment(uint32_t max_block_size = 10,
                              std::chrono::milliseconds batch_timeout =
                                  std::chrono::milliseconds(1000));

struct TestNet {
  Deployment deployment;
  std::unique_ptr<Network> network;

  Peer& peer(size_t i) { return *network->peers()[i]; }
  // Card for any participant registered at the gateway peer.
  HolderCard Card(const std::string& participant_id) const;
  // Endorse, order and wait; flushes the orderer in manual mode.
  TxOutcome Submit(const HolderCard& card, chaincode::TransactionPayload payload);
};

TestNet MakeTestNet(Network::Options options = {},
                    Deployment deployment = StandardDeployment());

// Peers commit a block one after another; polls until they agree.
bool AwaitConvergence(Network& network,
                      std::chrono::milliseconds timeout = std::chrono::seconds(5));

// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace doorledger::testing

#endif  // DOORLEDGER_TESTS_SUPPORT_H_
