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

// doorledger: node server and admin client.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "doorledger/bench.h"
#include "doorledger/config.h"
#include "doorledger/gateway.h"
#include "doorledger/network.h"
#include "doorledger/validation.h"

namespace doorledger {
namespace {

constexpr char kDefaultGateway[] = "http://127.0.0.1:8080";

void PrintJson(const Json& j) { std::cout << CanonicalJson(j) << "\n" << std::flush; }

int Fail(const absl::Status& status) {
  PrintJson({{"error", ErrorName(status)}, {"message", std::string(status.message())}});
  return 1;
}

absl::StatusOr<HolderCard> ReadCard(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  Json j = Json::parse(*text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat("MalformedCard: ", path));
  }
  return HolderCardFromJson(j);
}

// Shared by every subcommand that talks to a gateway.
struct Session {
  std::string card_path;
  std::string gateway;

  void AddOptions(CLI::App* app) {
    app->add_option("--card", card_path, "card file")->required();
    app->add_option("--gateway", gateway, "gateway URL (default: card's, then local)");
  }

  absl::StatusOr<GatewayClient> Connect() const {
    auto card = ReadCard(card_path);
    if (!card.ok()) return card.status();
    std::string url = gateway;
    if (url.empty()) url = card->gateway.value_or(kDefaultGateway);
    GatewayClient client(url);
    if (auto st = client.Login(*card); !st.ok()) return st;
    return client;
  }
};

int SubmitAs(const Session& s, const chaincode::TransactionPayload& payload) {
  auto client = s.Connect();
  if (!client.ok()) return Fail(client.status());
  auto r = client->Submit(payload);
  if (!r.ok()) return Fail(r.status());
  PrintJson(*r);
  return 0;
}

int Serve(const std::string& config_path) {
  auto config = LoadNodeConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);

  Network::Options nopts;
  nopts.data_dir = config->data_dir;
  nopts.threaded = true;
  nopts.mvcc_retries = config->mvcc_retries;
  auto network = Network::Create(config->genesis, config->peers, nopts);
  if (!network.ok()) return Fail(network.status());
  GatewayOptions gopts;
  gopts.host = config->listen_host;
  gopts.port = config->listen_port;
  gopts.webhook_url = config->webhook_url;
  gopts.max_clock_skew = config->max_clock_skew;
  Gateway gateway(**network, config->ca_key, gopts);
  auto port = gateway.Start();
  if (!port.ok()) return Fail(port.status());
  PrintJson({{"listening", gateway.url()},
             {"height", (*network)->gateway_peer().height()},
             {"peers", (*network)->peers().size()}});
  int sig = 0;
  sigwait(&stop, &sig);
  gateway.Stop();
  return 0;
}

int BenchRun(const std::string& config_path, const std::string& node_path,
             const std::string& card_path,
             const std::string& gateway, const std::string& format,
             const std::string& out) {
  auto bench_config = LoadBenchConfig(config_path);
  if (!bench_config.ok()) return Fail(bench_config.status());
  absl::StatusOr<bench::BenchReport> report;
  if (card_path.empty()) {
    // In-process: a fresh in-memory network from the node config.
    auto node = LoadNodeConfig(node_path.empty() ? config_path : node_path);
    if (!node.ok()) return Fail(node.status());
    Network::Options nopts;
    nopts.threaded = true;
    nopts.mvcc_retries = node->mvcc_retries;
    auto network = Network::Create(node->genesis, node->peers, nopts);
    if (!network.ok()) return Fail(network.status());
    std::optional<std::string> admin_id;
    for (const Participant& p : node->genesis.bootstrap.participants) {
      if (p.role == Role::kAdmin) {
        admin_id = p.participant_id;
        break;
      }
    }
    if (!admin_id) return Fail(absl::FailedPreconditionError("no bootstrap Admin"));
    auto admin = IssueCard(*admin_id, node->ca_key,
                           [&](std::string_view id) { return id == *admin_id; });
    if (!admin.ok()) return Fail(admin.status());
    auto target = bench::InProcessTarget(**network, node->ca_key);
    report = bench::RunRound(*bench_config, *target, *admin);
  } else {
    auto admin = ReadCard(card_path);
    if (!admin.ok()) return Fail(admin.status());
    std::string url = gateway;
    if (url.empty()) url = admin->gateway.value_or(kDefaultGateway);
    auto target = HttpTarget(url);
    report = bench::RunRound(*bench_config, *target, *admin);
  }
  if (!report.ok()) return Fail(report.status());
  if (!out.empty()) {
    if (auto st = WriteFile(out, CanonicalJson(bench::ToJson(*report))); !st.ok()) {
      return Fail(st);
    }
  }
  if (format == "markdown") {
    std::cout << bench::EmitReport(*report, bench::Format::kMarkdown);
  } else {
    Json summary = bench::ToJson(*report);
    summary.erase("samples");
    PrintJson(summary);
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"doorledger: permissioned-ledger physical access control"};
  app.require_subcommand(1);
  int rc = 0;

  // init
  InitOptions init;
  auto* init_cmd = app.add_subcommand("init", "write a single-node deployment");
  init_cmd->add_option("--dir", init.dir, "output directory")->required();
  init_cmd->add_option("--name", init.network_name, "network name");
  init_cmd->add_option("--admin", init.admin_id, "bootstrap Admin participant id");
  init_cmd->add_option("--port", init.listen_port, "gateway listen port");
  init_cmd->callback([&] {
    init.genesis_time = Now();
    auto r = InitDeployment(init);
    rc = r.ok() ? (PrintJson({{"config", r->config_path}, {"adminCard", r->admin_card_path}}), 0)
                : Fail(r.status());
  });

  // serve
  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "run peers, orderer and gateway");
  serve_cmd->add_option("--config", serve_config, "node config (TOML)")->required();
  serve_cmd->callback([&] { rc = Serve(serve_config); });

  // card issue|revoke
  auto* card_cmd = app.add_subcommand("card", "card management");
  card_cmd->require_subcommand(1);
  Session card_issue_s;
  std::string issue_participant, issue_out;
  auto* card_issue = card_cmd->add_subcommand("issue", "issue a card (Admin)");
  card_issue_s.AddOptions(card_issue);
  card_issue->add_option("--participant", issue_participant)->required();
  card_issue->add_option("--out", issue_out, "write the holder card here")->required();
  card_issue->callback([&] {
    auto client = card_issue_s.Connect();
    if (!client.ok()) return void(rc = Fail(client.status()));
    auto j = client->Post("/api/cards", {{"participantId", issue_participant}});
    if (!j.ok()) return void(rc = Fail(j.status()));
    auto holder = HolderCardFromJson(*j);
    if (!holder.ok()) return void(rc = Fail(holder.status()));
    holder->gateway = client->base_url();
    if (auto st = WriteFile(issue_out, CanonicalJson(ToJson(*holder))); !st.ok()) {
      return void(rc = Fail(st));
    }
    PrintJson(ToJson(holder->card));
  });
  Session card_revoke_s;
  std::string revoke_card_id;
  auto* card_revoke = card_cmd->add_subcommand("revoke", "revoke a card (Admin)");
  card_revoke_s.AddOptions(card_revoke);
  card_revoke->add_option("--card-id", revoke_card_id)->required();
  card_revoke->callback(
      [&] { rc = SubmitAs(card_revoke_s, chaincode::RevokeCard{revoke_card_id}); });

  // admin register-*
  auto* admin_cmd = app.add_subcommand("admin", "register entities");
  admin_cmd->require_subcommand(1);
  Session reg_part_s;
  Participant part;
  std::string part_role = "Employee", part_dept;
  auto* reg_part = admin_cmd->add_subcommand("register-participant");
  reg_part_s.AddOptions(reg_part);
  reg_part->add_option("--id", part.participant_id)->required();
  reg_part->add_option("--name", part.display_name)->required();
  reg_part->add_option("--role", part_role, "Admin|CEO|Manager|Employee");
  reg_part->add_option("--department", part_dept);
  reg_part->callback([&] {
    auto role = ParseRole(part_role);
    if (!role.ok()) return void(rc = Fail(role.status()));
    part.role = *role;
    if (!part_dept.empty()) part.department_id = part_dept;
    rc = SubmitAs(reg_part_s, chaincode::RegisterParticipant{part});
  });
  Session reg_place_s;
  PhysicalPlace place;
  auto* reg_place = admin_cmd->add_subcommand("register-place");
  reg_place_s.AddOptions(reg_place);
  reg_place->add_option("--id", place.place_id)->required();
  reg_place->add_option("--description", place.description)->required();
  reg_place->add_option("--department", place.department_id)->required();
  reg_place->callback(
      [&] { rc = SubmitAs(reg_place_s, chaincode::RegisterPlace{place}); });
  Session reg_dept_s;
  Department dept;
  auto* reg_dept = admin_cmd->add_subcommand("register-department");
  reg_dept_s.AddOptions(reg_dept);
  reg_dept->add_option("--id", dept.department_id)->required();
  reg_dept->add_option("--name", dept.name)->required();
  reg_dept->add_option("--ceo", dept.ceo_participant_id)->required();
  reg_dept->callback(
      [&] { rc = SubmitAs(reg_dept_s, chaincode::RegisterDepartment{dept}); });

  // access grant|revoke|check
  auto* access_cmd = app.add_subcommand("access", "grants and door checks");
  access_cmd->require_subcommand(1);
  Session grant_s, revoke_s, check_s;
  std::string grant_who, grant_place, revoke_who, revoke_place, check_place;
  auto* grant = access_cmd->add_subcommand("grant");
  grant_s.AddOptions(grant);
  grant->add_option("--participant", grant_who)->required();
  grant->add_option("--place", grant_place)->required();
  grant->callback(
      [&] { rc = SubmitAs(grant_s, chaincode::GrantAccess{grant_who, grant_place}); });
  auto* revoke = access_cmd->add_subcommand("revoke");
  revoke_s.AddOptions(revoke);
  revoke->add_option("--participant", revoke_who)->required();
  revoke->add_option("--place", revoke_place)->required();
  revoke->callback([&] {
    rc = SubmitAs(revoke_s, chaincode::RevokeAccess{revoke_who, revoke_place});
  });
  auto* check = access_cmd->add_subcommand("check", "door-reader check as the card holder");
  check_s.AddOptions(check);
  check->add_option("--place", check_place)->required();
  check->callback([&] { rc = SubmitAs(check_s, chaincode::CheckAccess{check_place}); });

  // delegate grant|revoke
  auto* delegate_cmd = app.add_subcommand("delegate", "department delegation");
  delegate_cmd->require_subcommand(1);
  Session dgrant_s, drevoke_s;
  std::string dgrant_who, dgrant_dept, drevoke_who, drevoke_dept;
  auto* dgrant = delegate_cmd->add_subcommand("grant");
  dgrant_s.AddOptions(dgrant);
  dgrant->add_option("--participant", dgrant_who)->required();
  dgrant->add_option("--department", dgrant_dept)->required();
  dgrant->callback([&] {
    rc = SubmitAs(dgrant_s, chaincode::DelegateAuthority{dgrant_who, dgrant_dept});
  });
  auto* drevoke = delegate_cmd->add_subcommand("revoke");
  drevoke_s.AddOptions(drevoke);
  drevoke->add_option("--participant", drevoke_who)->required();
  drevoke->add_option("--department", drevoke_dept)->required();
  drevoke->callback([&] {
    rc = SubmitAs(drevoke_s, chaincode::RevokeDelegation{drevoke_who, drevoke_dept});
  });

  // historian
  Session hist_s;
  std::string hist_participant, hist_type, hist_from, hist_to;
  int hist_limit = 0;
  auto* hist = app.add_subcommand("historian", "query historian records");
  hist_s.AddOptions(hist);
  hist->add_option("--participant", hist_participant);
  hist->add_option("--type", hist_type);
  hist->add_option("--from", hist_from, "RFC3339");
  hist->add_option("--to", hist_to, "RFC3339");
  hist->add_option("--limit", hist_limit, "newest N records, oldest first");
  hist->callback([&] {
    auto client = hist_s.Connect();
    if (!client.ok()) return void(rc = Fail(client.status()));
    httplib::Params params;
    if (!hist_participant.empty()) params.emplace("participant", hist_participant);
    if (!hist_type.empty()) params.emplace("type", hist_type);
    if (!hist_from.empty()) params.emplace("from", hist_from);
    if (!hist_to.empty()) params.emplace("to", hist_to);
    if (hist_limit > 0) params.emplace("limit", std::to_string(hist_limit));
    std::string path = "/api/historian";
    if (!params.empty()) path = httplib::append_query_params(path, params);
    auto j = client->Get(path);
    if (!j.ok()) return void(rc = Fail(j.status()));
    PrintJson(*j);
  });

  // chain verify
  auto* chain_cmd = app.add_subcommand("chain", "ledger inspection");
  chain_cmd->require_subcommand(1);
  std::string verify_blocks, verify_card, verify_gateway;
  auto* verify = chain_cmd->add_subcommand("verify", "verify a block file or a node");
  verify->add_option("--blocks", verify_blocks, "local block file");
  verify->add_option("--card", verify_card, "card file (gateway mode)");
  verify->add_option("--gateway", verify_gateway, "gateway URL");
  verify->callback([&] {
    Json report;
    if (!verify_blocks.empty()) {
      report = ToJson(VerifyBlockFile(verify_blocks));
    } else {
      std::string url = verify_gateway;
      if (url.empty() && !verify_card.empty()) {
        auto card = ReadCard(verify_card);
        if (!card.ok()) return void(rc = Fail(card.status()));
        url = card->gateway.value_or("");
      }
      if (url.empty()) url = kDefaultGateway;
      GatewayClient client(url);
      auto j = client.Get("/api/chain/verify");
      if (!j.ok()) return void(rc = Fail(j.status()));
      report = *j;
    }
    PrintJson(report);
    rc = report.value("ok", false) ? 0 : 3;
  });

  // bench run
  auto* bench_cmd = app.add_subcommand("bench", "load generator");
  bench_cmd->require_subcommand(1);
  std::string bench_config, bench_node, bench_card, bench_gateway, bench_out, bench_format = "json";
  auto* bench_run = bench_cmd->add_subcommand(
      "run", "one round; in-process unless --card points at a gateway");
  bench_run->add_option("--config", bench_config, "bench or node config (TOML)")->required();
  bench_run->add_option("--node", bench_node, "node config for in-process runs (default: --config)");
  bench_run->add_option("--card", bench_card, "Admin card; drives a running gateway");
  bench_run->add_option("--gateway", bench_gateway, "gateway URL");
  bench_run->add_option("--format", bench_format, "json|markdown")
      ->check(CLI::IsMember({"json", "markdown"}));
  bench_run->add_option("--out", bench_out, "write the full report with samples");
  bench_run->callback([&] {
    rc = BenchRun(bench_config, bench_node, bench_card, bench_gateway, bench_format, bench_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return Fail(absl::InvalidArgumentError(absl::StrCat("UsageError: ", e.what())));
  }
  return rc;
}

}  // namespace
}  // namespace doorledger

int main(int argc, char** argv) { return doorledger::Main(argc, argv); }
