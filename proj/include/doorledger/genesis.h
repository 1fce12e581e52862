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

#ifndef DOORLEDGER_GENESIS_H_
#define DOORLEDGER_GENESIS_H_

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "doorledger/acl.h"
#include "doorledger/chaincode.h"
#include "doorledger/ledger.h"

namespace doorledger {

struct PeerIdentity {
  std::string peer_id;
  std::string org_id;
  PublicKey public_key;
};

struct BootstrapEntities {
  std::vector<Participant> participants;
  std::vector<Department> departments;
  std::vector<PhysicalPlace> places;
};

// Everything every peer must agree on. Embedded verbatim (canonical JSON)
// in the genesis block.
struct GenesisConfig {
  std::string network_name = "physical-access-network";
  Timestamp genesis_time;
  PublicKey ca_public_key;
  std::vector<PeerIdentity> peers;
  std::set<std::string> endorsement_orgs;
  uint32_t max_block_size = 10;
  std::chrono::milliseconds batch_timeout{1000};
  uint32_t intrusion_threshold = 3;
  std::vector<acl::AclRule> rules;
  // Must contain at least one Admin participant.
  BootstrapEntities bootstrap;
};

Json ToJson(const GenesisConfig& config);
absl::StatusOr<GenesisConfig> GenesisConfigFromJson(const Json& j);

// InvalidArgument ("InvalidBootstrap: ...") when the network cannot work.
absl::Status ValidateGenesisConfig(const GenesisConfig& config);

// Height 0, zero prevHash, one registration transaction per bootstrap
// entity. Deterministic in the config.
absl::StatusOr<Block> BuildGenesisBlock(const GenesisConfig& config);

absl::StatusOr<GenesisConfig> ReadGenesisConfig(const Block& genesis);

chaincode::ChainConfig ToChainConfig(const GenesisConfig& config);

// A conservative default rule set: admins everywhere, CEOs and managers in
// their own department (managers during working hours), everyone else by
// dynamic grant only.
std::vector<acl::AclRule> DefaultRules();

}  // namespace doorledger

#endif  // DOORLEDGER_GENESIS_H_
