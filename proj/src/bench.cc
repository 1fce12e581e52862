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

#include "doorledger/bench.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "doorledger/network.h"

namespace doorledger::bench {
namespace {

using Clock = std::chrono::steady_clock;

std::string Seconds(const std::optional<double>& v) {
  return v ? absl::StrFormat("%.3f s", *v) : "-";
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptionalFrom(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

class InProcess final : public Target {
 public:
  InProcess(Network& network, SigningKey ca) : network_(network), ca_(std::move(ca)) {}

  absl::StatusOr<TargetResult> Submit(
      const HolderCard& card, const chaincode::TransactionPayload& payload) override {
    auto outcome = network_.SubmitAndWait(MakeProposal(card, payload));
    if (!outcome.ok()) return outcome.status();
    TargetResult r;
    r.tx_id = outcome->tx_id;
    r.committed_valid = outcome->submitted && outcome->validity == TxValidity::kValid;
    if (!outcome->result.response.ok()) {
      r.error = absl::StrCat(std::string(chaincode::AppErrorName(outcome->result.response.code)),
                             ": ", outcome->result.response.message);
    }
    return r;
  }

  absl::StatusOr<HolderCard> Enroll(const HolderCard&,
                                    const std::string& participant_id) override {
    auto state = network_.gateway_peer().state();
    return IssueCard(participant_id, ca_, [&](std::string_view id) {
      return state->Read(chaincode::keys::Participant(id)).has_value();
    });
  }

 private:
  Network& network_;
  SigningKey ca_;
};

// Submits every payload concurrently as `card`; fails on the first error.
absl::Status SubmitAll(Target& target, const HolderCard& card,
                       const std::vector<chaincode::TransactionPayload>& payloads) {
  std::vector<std::future<absl::StatusOr<TargetResult>>> futures;
  for (const auto& p : payloads) {
    futures.push_back(std::async(std::launch::async,
                                 [&target, &card, p] { return target.Submit(card, p); }));
  }
  absl::Status first = absl::OkStatus();
  for (auto& f : futures) {
    auto r = f.get();
    if (!r.ok()) {
      if (first.ok()) first = r.status();
    } else if (!r->committed_valid || !r->error.empty()) {
      if (first.ok()) {
        first = absl::FailedPreconditionError(
            absl::StrCat("bench init: ", r->tx_id, " ", r->error));
      }
    }
  }
  return first;
}

}  // namespace

std::string_view PresetName(Preset p) {
  return p == Preset::kConflict ? "conflict" : "non-conflicting";
}

absl::StatusOr<Preset> ParsePreset(std::string_view name) {
  if (name == "non-conflicting") return Preset::kNonConflicting;
  if (name == "conflict") return Preset::kConflict;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown bench preset: ", std::string(name)));
}

absl::Status ValidateBenchConfig(const BenchConfig& c) {
  if (!(c.send_rate > 0)) return absl::InvalidArgumentError("sendRate must be > 0");
  if (c.client_count < 1 || c.places_per_client < 1) {
    return absl::InvalidArgumentError("clientCount and placesPerClient must be >= 1");
  }
  const WorkloadMix& m = c.mix;
  if (m.check < 0 || m.grant < 0 || m.revoke < 0 ||
      std::abs(m.check + m.grant + m.revoke - 1.0) > 1e-6) {
    return absl::InvalidArgumentError("workload mix must be non-negative and sum to 1");
  }
  return absl::OkStatus();
}

std::optional<double> NearestRankPercentile(std::vector<double> values, double pct) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<size_t>(std::ceil(pct / 100.0 * values.size()));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

BenchReport Aggregate(const std::string& name, double send_rate,
                      std::vector<Sample> samples) {
  BenchReport r;
  r.name = name;
  r.send_rate = send_rate;
  std::vector<double> latencies;
  std::optional<int64_t> first_send;
  std::optional<int64_t> last_commit;
  for (const Sample& s : samples) {
    if (!first_send || s.send_us < *first_send) first_send = s.send_us;
    if (!s.succ || !s.commit_us) {
      ++r.fail;
      continue;
    }
    ++r.succ;
    latencies.push_back(static_cast<double>(*s.commit_us - s.send_us) / 1e6);
    if (!last_commit || *s.commit_us > *last_commit) last_commit = *s.commit_us;
  }
  if (!latencies.empty()) {
    r.max_latency = *std::max_element(latencies.begin(), latencies.end());
    r.min_latency = *std::min_element(latencies.begin(), latencies.end());
    r.avg_latency = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                    static_cast<double>(latencies.size());
    r.p75_latency = NearestRankPercentile(latencies, 75);
    const double span = static_cast<double>(*last_commit - *first_send) / 1e6;
    r.throughput = span > 0 ? static_cast<double>(r.succ) / span : 0;
  }
  r.samples = std::move(samples);
  return r;
}

Json ToJson(const BenchReport& r) {
  Json samples = Json::array();
  for (const Sample& s : r.samples) {
    samples.push_back({{"type", s.type},
                       {"sendTimeUs", s.send_us},
                       {"commitTimeUs", s.commit_us ? Json(*s.commit_us) : Json(nullptr)},
                       {"succ", s.succ},
                       {"txId", s.tx_id},
                       {"error", s.error}});
  }
  return {{"name", r.name},
          {"succ", r.succ},
          {"fail", r.fail},
          {"sendRate", r.send_rate},
          {"maxLatency", OptionalJson(r.max_latency)},
          {"minLatency", OptionalJson(r.min_latency)},
          {"avgLatency", OptionalJson(r.avg_latency)},
          {"p75Latency", OptionalJson(r.p75_latency)},
          {"throughput", r.throughput},
          {"samples", samples}};
}

absl::StatusOr<BenchReport> ReportFromJson(const Json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("report object");
  BenchReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.succ = j.at("succ").get<uint64_t>();
    r.fail = j.at("fail").get<uint64_t>();
    r.send_rate = j.at("sendRate").get<double>();
    r.max_latency = OptionalFrom(j, "maxLatency");
    r.min_latency = OptionalFrom(j, "minLatency");
    r.avg_latency = OptionalFrom(j, "avgLatency");
    r.p75_latency = OptionalFrom(j, "p75Latency");
    r.throughput = j.at("throughput").get<double>();
    for (const Json& s : j.at("samples")) {
      Sample out;
      out.type = s.at("type").get<std::string>();
      out.send_us = s.at("sendTimeUs").get<int64_t>();
      if (!s.at("commitTimeUs").is_null()) out.commit_us = s.at("commitTimeUs").get<int64_t>();
      out.succ = s.at("succ").get<bool>();
      out.tx_id = s.value("txId", "");
      out.error = s.value("error", "");
      r.samples.push_back(std::move(out));
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("report: ", e.what()));
  }
  return r;
}

std::string EmitReport(const BenchReport& r, Format format) {
  if (format == Format::kJson) return CanonicalJson(ToJson(r));
  return absl::StrCat(
      kMarkdownHeader, "\n",
      "|------|------|------|-----------|-------------|-------------|"
      "-------------|----------------|------------|\n",
      absl::StrFormat("| %s | %d | %d | %.1f tps | %s | %s | %s | %s | %.1f tps |\n",
                      r.name, r.succ, r.fail, r.send_rate, Seconds(r.max_latency),
                      Seconds(r.min_latency), Seconds(r.avg_latency),
                      Seconds(r.p75_latency), r.throughput));
}

std::unique_ptr<Target> InProcessTarget(Network& network, SigningKey ca_key) {
  return std::make_unique<InProcess>(network, std::move(ca_key));
}

Round::Round(BenchConfig config, Target& target, HolderCard admin)
    : config_(std::move(config)), target_(target), admin_(std::move(admin)) {}

absl::Status Round::Init() {
  if (auto st = ValidateBenchConfig(config_); !st.ok()) return st;
  run_id_ = ToHex(RandomBytes(4));
  const std::string base = absl::StrCat("bench-", run_id_);
  const std::string dept = base;
  const std::string ceo = base + "-ceo";

  std::vector<chaincode::TransactionPayload> people;
  people.push_back(chaincode::RegisterParticipant{
      {ceo, "bench CEO", Role::kCeo, dept}});
  std::vector<std::string> client_ids;
  for (uint32_t c = 0; c < config_.client_count; ++c) {
    client_ids.push_back(absl::StrCat(base, "-client-", c));
    people.push_back(chaincode::RegisterParticipant{
        {client_ids.back(), "bench client", Role::kAdmin, std::nullopt}});
    people.push_back(chaincode::RegisterParticipant{
        {absl::StrCat(base, "-target-", c), "bench target", Role::kEmployee,
         std::nullopt}});
  }
  if (auto st = SubmitAll(target_, admin_, people); !st.ok()) return st;
  if (auto st = SubmitAll(target_, admin_,
                          {chaincode::RegisterDepartment{{dept, "bench", ceo}}});
      !st.ok()) {
    return st;
  }
  std::vector<chaincode::TransactionPayload> places;
  for (uint32_t p = 0; p < config_.places_per_client; ++p) {
    places_.push_back(absl::StrCat(base, "-place-", p));
    places.push_back(chaincode::RegisterPlace{{places_.back(), "bench door", dept}});
  }
  if (auto st = SubmitAll(target_, admin_, places); !st.ok()) return st;
  for (uint32_t c = 0; c < config_.client_count; ++c) {
    auto card = target_.Enroll(admin_, client_ids[c]);
    if (!card.ok()) return card.status();
    clients_.push_back({*std::move(card), absl::StrCat(base, "-target-", c)});
  }
  return absl::OkStatus();
}

chaincode::TransactionPayload Round::PayloadFor(uint64_t i, const std::string& type,
                                                const Client& client) const {
  // Non-conflicting: transaction i owns key slot i mod (clients * places), so
  // a slot is reused only after every other slot has been used once.
  const uint64_t places = config_.places_per_client;
  const std::string& place =
      config_.preset == Preset::kConflict ? places_.front() : places_[i % places];
  const std::string& target = config_.preset == Preset::kConflict
                                  ? clients_.front().target_participant
                                  : client.target_participant;
  if (type == "GrantAccess") return chaincode::GrantAccess{target, place};
  if (type == "RevokeAccess") return chaincode::RevokeAccess{target, place};
  return chaincode::CheckAccess{place};
}

absl::Status Round::Run() {
  if (clients_.empty() && config_.total_transactions > 0) {
    return absl::FailedPreconditionError("Init() must run first");
  }
  std::mt19937_64 rng(config_.seed);
  std::discrete_distribution<int> mix(
      {config_.mix.check, config_.mix.grant, config_.mix.revoke});
  static constexpr const char* kTypes[] = {"CheckAccess", "GrantAccess", "RevokeAccess"};

  const uint64_t n = config_.total_transactions;
  samples_.assign(n, Sample{});
  std::vector<std::thread> inflight;
  inflight.reserve(n);
  const auto t0 = Clock::now();
  auto since = [t0] {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0)
        .count();
  };
  const uint64_t slots = uint64_t{config_.client_count} * config_.places_per_client;
  for (uint64_t i = 0; i < n; ++i) {
    const std::string type = kTypes[mix(rng)];
    const uint64_t c = config_.preset == Preset::kConflict
                           ? i % config_.client_count
                           : (i % slots) / config_.places_per_client;
    const Client& client = clients_[c];
    chaincode::TransactionPayload payload = PayloadFor(i, type, client);
    std::this_thread::sleep_until(
        t0 + std::chrono::microseconds(
                 static_cast<int64_t>(std::llround(1e6 * i / config_.send_rate))));
    Sample& sample = samples_[i];
    sample.type = type;
    sample.send_us = since();
    inflight.emplace_back([this, &sample, &client, payload = std::move(payload), since] {
      auto r = target_.Submit(client.card, payload);
      if (!r.ok()) {
        sample.error = std::string(r.status().message());
        return;
      }
      sample.tx_id = r->tx_id;
      sample.error = r->error;
      if (r->committed_valid) sample.commit_us = since();
      sample.succ = r->committed_valid && r->error.empty();
    });
  }
  for (std::thread& t : inflight) t.join();
  return absl::OkStatus();
}

BenchReport Round::End() {
  clients_.clear();
  return Aggregate(config_.name, config_.send_rate, std::move(samples_));
}

absl::StatusOr<BenchReport> RunRound(const BenchConfig& config, Target& target,
                                     const HolderCard& admin) {
  Round round(config, target, admin);
  if (config.total_transactions > 0) {
    if (auto st = round.Init(); !st.ok()) return st;
  }
  if (auto st = round.Run(); !st.ok()) return st;
  return round.End();
}

}  // namespace doorledger::bench
