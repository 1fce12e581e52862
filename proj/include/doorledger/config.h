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

#ifndef DOORLEDGER_CONFIG_H_
#define DOORLEDGER_CONFIG_H_

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/bench.h"
#include "doorledger/genesis.h"
#include "doorledger/network.h"

namespace doorledger {

// Everything one node needs, from a single TOML document. Relative paths
// resolve against the directory of the config file.
struct NodeConfig {
  GenesisConfig genesis;
  std::vector<PeerSpec> peers;
  SigningKey ca_key;
  std::string data_dir;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::optional<std::string> webhook_url;
  uint32_t mvcc_retries = 3;
  std::chrono::seconds max_clock_skew{300};
  bench::BenchConfig bench;
};

absl::StatusOr<NodeConfig> LoadNodeConfig(const std::string& path);

// A standalone bench file, or the [bench] table of a node config.
absl::StatusOr<bench::BenchConfig> LoadBenchConfig(const std::string& path);

absl::Status SaveSigningKey(const std::string& path, const SigningKey& key);
absl::StatusOr<SigningKey> LoadSigningKey(const std::string& path);

struct InitOptions {
  std::string dir;
  std::string network_name = "physical-access-network";
  std::string admin_id = "admin";
  int listen_port = 8080;
  Timestamp genesis_time;
};

struct InitResult {
  std::string config_path;
  std::string admin_card_path;
};

// Writes config.toml, rules.json, fresh CA and peer keys, and a card for
// the bootstrap Admin. Refuses to overwrite an existing config.
absl::StatusOr<InitResult> InitDeployment(const InitOptions& options);

}  // namespace doorledger

#endif  // DOORLEDGER_CONFIG_H_
