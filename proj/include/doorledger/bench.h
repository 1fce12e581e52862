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

#ifndef DOORLEDGER_BENCH_H_
#define DOORLEDGER_BENCH_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/chaincode.h"
#include "doorledger/domain.h"

namespace doorledger {
class Network;
}

namespace doorledger::bench {

enum class Preset { kNonConflicting, kConflict };

std::string_view PresetName(Preset p);
absl::StatusOr<Preset> ParsePreset(std::string_view name);

struct WorkloadMix {
  double check = 0.7;
  double grant = 0.2;
  double revoke = 0.1;
};

struct BenchConfig {
  std::string name = "access-control";
  uint64_t total_transactions = 500;
  double send_rate = 10;  // tps
  WorkloadMix mix;
  uint32_t client_count = 10;
  uint32_t places_per_client = 10;
  uint64_t seed = 1;
  Preset preset = Preset::kNonConflicting;
};

absl::Status ValidateBenchConfig(const BenchConfig& config);

struct Sample {
  std::string type;
  // Microseconds from the start of the run phase.
  int64_t send_us = 0;
  std::optional<int64_t> commit_us;
  bool succ = false;
  std::string tx_id;
  std::string error;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Latencies in seconds, throughput and send rate in tps.
struct BenchReport {
  std::string name;
  uint64_t succ = 0;
  uint64_t fail = 0;
  double send_rate = 0;
  std::optional<double> max_latency;
  std::optional<double> min_latency;
  std::optional<double> avg_latency;
  std::optional<double> p75_latency;
  double throughput = 0;
  std::vector<Sample> samples;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// Nearest-rank: the value at rank ceil(pct/100 * n) of the sorted samples.
std::optional<double> NearestRankPercentile(std::vector<double> values,
                                            double pct);

// Latency statistics over successful samples; throughput is
// succ / (last commit - first send).
BenchReport Aggregate(const std::string& name, double send_rate,
                      std::vector<Sample> samples);

enum class Format { kMarkdown, kJson };

inline constexpr char kMarkdownHeader[] =
    "| Name | Succ | Fail | Send Rate | Max Latency | Min Latency | "
    "Avg Latency | 75%ile Latency | Throughput |";

std::string EmitReport(const BenchReport& report, Format format);
Json ToJson(const BenchReport& report);
absl::StatusOr<BenchReport> ReportFromJson(const Json& j);

struct TargetResult {
  std::string tx_id;
  bool committed_valid = false;
  std::string error;  // empty when the application response was Ok
};

// Where a round sends its load: the in-process network or a gateway.
class Target {
 public:
  virtual ~Target() = default;
  virtual absl::StatusOr<TargetResult> Submit(
      const HolderCard& card, const chaincode::TransactionPayload& payload) = 0;
  // Card for an already registered participant.
  virtual absl::StatusOr<HolderCard> Enroll(const HolderCard& admin,
                                            const std::string& participant_id) = 0;
};

std::unique_ptr<Target> InProcessTarget(Network& network, SigningKey ca_key);

// init registers fixtures, run drives load at the fixed send rate, end
// aggregates.
class Round {
 public:
  Round(BenchConfig config, Target& target, HolderCard admin);

  absl::Status Init();
  absl::Status Run();
  BenchReport End();

 private:
  struct Client {
    HolderCard card;
    std::string target_participant;
  };

  chaincode::TransactionPayload PayloadFor(uint64_t i, const std::string& type,
                                           const Client& client) const;

  BenchConfig config_;
  Target& target_;
  HolderCard admin_;
  std::string run_id_;
  std::vector<Client> clients_;
  std::vector<std::string> places_;
  std::vector<Sample> samples_;
};

absl::StatusOr<BenchReport> RunRound(const BenchConfig& config, Target& target,
                                     const HolderCard& admin);

}  // namespace doorledger::bench

#endif  // DOORLEDGER_BENCH_H_
