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

#include "doctest.h"
#include "doorledger/bench.h"
#include "doorledger/network.h"
#include "support.h"

namespace doorledger::bench {
namespace {

Sample S(int64_t send, std::optional<int64_t> commit, bool succ = true) {
  return {"CheckAccess", send, commit, succ, "tx", ""};
}

TEST_CASE("nearest-rank percentile") {
  CHECK(*NearestRankPercentile({1, 2, 3, 4}, 75) == 3);
  CHECK(*NearestRankPercentile({4, 3, 2, 1}, 75) == 3);
  CHECK(*NearestRankPercentile({5}, 75) == 5);
  CHECK(*NearestRankPercentile({1, 2, 3, 4, 5}, 75) == 4);
  CHECK(*NearestRankPercentile({1, 2, 3, 4}, 100) == 4);
  CHECK(*NearestRankPercentile({1, 2, 3, 4}, 0) == 1);
  CHECK_FALSE(NearestRankPercentile({}, 75).has_value());
}

TEST_CASE("aggregate over successful samples only") {
  // Latencies 1, 2, 3, 4 s; one failure with no commit.
  std::vector<Sample> s = {S(0, 1000000), S(1000000, 3000000), S(2000000, 5000000),
                           S(3000000, 7000000), S(4000000, std::nullopt, false)};
  BenchReport r = Aggregate("t", 10, s);
  CHECK(r.succ == 4);
  CHECK(r.fail == 1);
  CHECK(*r.min_latency == doctest::Approx(1));
  CHECK(*r.max_latency == doctest::Approx(4));
  CHECK(*r.avg_latency == doctest::Approx(2.5));
  CHECK(*r.p75_latency == doctest::Approx(3));
  // 4 successes over (7 s - 0 s).
  CHECK(r.throughput == doctest::Approx(4.0 / 7.0));
  CHECK(r.samples.size() == 5);
}

TEST_CASE("aggregate with no successes") {
  BenchReport r = Aggregate("t", 10, {S(0, std::nullopt, false)});
  CHECK(r.succ == 0);
  CHECK(r.fail == 1);
  CHECK_FALSE(r.avg_latency.has_value());
  CHECK(r.throughput == 0);
  CHECK(EmitReport(r, Format::kMarkdown).find("| - |") != std::string::npos);
}

TEST_CASE("markdown report has the header and one row of nine cells") {
  BenchReport r = Aggregate("access-control", 10, {S(0, 500000), S(100000, 900000)});
  std::string md = EmitReport(r, Format::kMarkdown);
  CHECK(md.rfind(kMarkdownHeader, 0) == 0);
  std::vector<std::string> lines;
  size_t start = 0;
  for (size_t nl; (nl = md.find('\n', start)) != std::string::npos; start = nl + 1) {
    lines.push_back(md.substr(start, nl - start));
  }
  REQUIRE(lines.size() == 3);
  CHECK(std::count(lines[2].begin(), lines[2].end(), '|') == 10);
  CHECK(lines[2].find("| access-control | 2 | 0 | 10.0 tps |") == 0);
}

TEST_CASE("json report round trip") {
  std::vector<Sample> s = {S(0, 1000), S(10, std::nullopt, false)};
  s[1].error = "Unauthorized: nope";
  BenchReport r = Aggregate("x", 2.5, s);
  std::string text = EmitReport(r, Format::kJson);
  auto back = ReportFromJson(Json::parse(text));
  REQUIRE(back.ok());
  CHECK(*back == r);
  Json j = Json::parse(text);
  for (const char* k : {"name", "succ", "fail", "sendRate", "maxLatency", "minLatency",
                        "avgLatency", "p75Latency", "throughput"}) {
    CHECK(j.contains(k));
  }
  CHECK_FALSE(ReportFromJson(Json::parse("[]")).ok());
}

TEST_CASE("config validation and presets") {
  BenchConfig c;
  CHECK(ValidateBenchConfig(c).ok());
  c.send_rate = 0;
  CHECK_FALSE(ValidateBenchConfig(c).ok());
  c = {};
  c.mix = {0.5, 0.2, 0.2};
  CHECK_FALSE(ValidateBenchConfig(c).ok());
  c = {};
  c.client_count = 0;
  CHECK_FALSE(ValidateBenchConfig(c).ok());
  CHECK(*ParsePreset("conflict") == Preset::kConflict);
  CHECK(PresetName(Preset::kNonConflicting) == "non-conflicting");
  CHECK_FALSE(ParsePreset("chaos").ok());
}

TEST_CASE("a short in-process round commits everything") {
  Network::Options o;
  o.threaded = true;
  auto net = testing::MakeTestNet(
      o, testing::StandardDeployment(10, std::chrono::milliseconds(100)));
  auto target = InProcessTarget(*net.network, net.deployment.ca);
  BenchConfig c;
  c.total_transactions = 40;
  c.send_rate = 50;
  c.client_count = 4;
  c.places_per_client = 5;
  auto report = RunRound(c, *target, net.Card("admin"));
  REQUIRE(report.ok());
  CHECK(report->succ == 40);
  CHECK(report->fail == 0);
  CHECK(report->throughput > 0);
  CHECK(*report->min_latency <= *report->avg_latency);
  CHECK(*report->avg_latency <= *report->max_latency);
  CHECK(*report->p75_latency <= *report->max_latency);
  int checks = 0;
  for (const Sample& s : report->samples) checks += s.type == "CheckAccess";
  CHECK(checks > 10);
  CHECK(testing::AwaitConvergence(*net.network));
}

TEST_CASE("the conflict preset produces MVCC pressure but no lost work") {
  Network::Options o;
  o.threaded = true;
  o.mvcc_retries = 0;
  auto net = testing::MakeTestNet(
      o, testing::StandardDeployment(10, std::chrono::milliseconds(100)));
  auto target = InProcessTarget(*net.network, net.deployment.ca);
  BenchConfig c;
  c.total_transactions = 40;
  c.send_rate = 100;
  c.mix = {0, 0.5, 0.5};
  c.client_count = 4;
  c.preset = Preset::kConflict;
  auto report = RunRound(c, *target, net.Card("admin"));
  REQUIRE(report.ok());
  CHECK(report->succ + report->fail == 40);
  CHECK(report->fail > 0);
  for (const Sample& s : report->samples) {
    if (!s.succ) CHECK(s.error.find("MvccRetryExhausted") != std::string::npos);
  }
}

}  // namespace
}  // namespace doorledger::bench
