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

#include "doorledger/gateway.h"

#include <atomic>
#include <cctype>
#include <map>
#include <mutex>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "httplib.h"

namespace doorledger {
namespace {

using chaincode::AppError;

constexpr char kJson[] = "application/json";

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(CanonicalJson(body), kJson);
}

void ReplyError(httplib::Response& res, int status, const std::string& error,
                const std::string& message) {
  Reply(res, status, {{"error", error}, {"message", message}, {"status", status}});
}

void ReplyStatus(httplib::Response& res, const absl::Status& status) {
  ReplyError(res, HttpStatusFor(status), ErrorName(status),
             std::string(status.message()));
}

struct Endpoint {
  const char* path;
  const char* type;
  // Register endpoints carry the entity under this payload key.
  const char* entity;
};

constexpr Endpoint kEndpoints[] = {
    {"/api/tx/grant", "GrantAccess", nullptr},
    {"/api/tx/revoke", "RevokeAccess", nullptr},
    {"/api/tx/delegate", "DelegateAuthority", nullptr},
    {"/api/tx/revoke-delegation", "RevokeDelegation", nullptr},
    {"/api/tx/register/participant", "RegisterParticipant", "participant"},
    {"/api/tx/register/place", "RegisterPlace", "place"},
    {"/api/tx/register/department", "RegisterDepartment", "department"},
    {"/api/tx/revoke-card", "RevokeCard", nullptr},
    {"/api/access/check", "CheckAccess", nullptr},
};

Json EventJson(const CommittedEvent& e) {
  Json j = chaincode::ToJson(e.event);
  j["id"] = EventId(e.coord);
  j["blockHeight"] = e.coord.height;
  j["txOffset"] = e.coord.offset;
  j["eventIndex"] = e.coord.index;
  return j;
}

std::optional<EventCoord> ParseEventId(const std::string& id) {
  std::vector<std::string> parts = absl::StrSplit(id, '-');
  if (parts.size() != 3) return std::nullopt;
  try {
    return EventCoord{std::stoull(parts[0]),
                      static_cast<uint32_t>(std::stoul(parts[1])),
                      static_cast<uint32_t>(std::stoul(parts[2]))};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  auto scheme = url.find("://");
  size_t start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string ErrorName(const absl::Status& status) {
  std::string msg(status.message());
  auto colon = msg.find(':');
  std::string head = msg.substr(0, colon);
  bool word = !head.empty() && std::isupper(static_cast<unsigned char>(head[0]));
  for (char c : head) word = word && std::isalnum(static_cast<unsigned char>(c));
  if (colon != std::string::npos && word) return head;
  std::string code = absl::StatusCodeToString(status.code());
  // "PERMISSION_DENIED" -> "PermissionDenied"
  std::string out;
  bool upper = true;
  for (char c : code) {
    if (c == '_') {
      upper = true;
      continue;
    }
    out.push_back(upper ? c : static_cast<char>(std::tolower(c)));
    upper = false;
  }
  return out;
}

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kUnauthenticated:
      return 401;
    case absl::StatusCode::kPermissionDenied:
      // A revoked card is an authentication failure, not a role failure.
      return absl::StartsWith(status.message(), "RevokedCard") ? 401 : 403;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kAborted:
      return 409;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 422;
    case absl::StatusCode::kDeadlineExceeded:
      return 504;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

int HttpStatusFor(AppError error) {
  switch (error) {
    case AppError::kOk:
      return 200;
    case AppError::kUnauthorized:
      return 403;
    case AppError::kNotFound:
      return 404;
    case AppError::kAlreadyExists:
      return 409;
    case AppError::kInvalidArgument:
    case AppError::kUnknownTransactionType:
      return 422;
  }
  return 500;
}

Bytes SessionChallengeBytes(std::string_view challenge) {
  std::string s = absl::StrCat("doorledger-session\n", std::string(challenge));
  return Bytes(s.begin(), s.end());
}

Json BlockToJson(const Block& block) {
  Json txs = Json::array();
  for (size_t i = 0; i < block.transactions.size(); ++i) {
    const TransactionEnvelope& tx = block.transactions[i];
    Json reads = Json::array();
    for (const auto& r : tx.result.rwset.reads) {
      Json v = nullptr;
      if (r.version) v = {{"block", r.version->block}, {"tx", r.version->tx}};
      reads.push_back({{"key", r.key}, {"version", v}});
    }
    Json writes = Json::array();
    for (const auto& w : tx.result.rwset.writes) {
      writes.push_back({{"key", w.key},
                        {"value", w.value ? Json(*w.value) : Json(nullptr)}});
    }
    Json events = Json::array();
    for (const auto& e : tx.result.events) events.push_back(chaincode::ToJson(e));
    Json endorsements = Json::array();
    for (const auto& e : tx.endorsements) {
      endorsements.push_back({{"peerId", e.peer_id},
                              {"orgId", e.org_id},
                              {"signature", ToBase64(e.signature)}});
    }
    Json j = {{"txId", tx.tx_id},
              {"attempt", tx.attempt},
              {"type", chaincode::PayloadTypeName(tx.proposal.payload)},
              {"payload", chaincode::ToJson(tx.proposal.payload)},
              {"cardId", tx.proposal.card.card_id},
              {"participantId", tx.proposal.card.participant_id},
              {"proposedAt", FormatRfc3339(tx.proposal.proposed_at)},
              {"response",
               {{"code", chaincode::AppErrorName(tx.result.response.code)},
                {"message", tx.result.response.message}}},
              {"reads", reads},
              {"writes", writes},
              {"events", events},
              {"endorsements", endorsements},
              {"validity", i < block.validity.size()
                               ? ValidityName(block.validity[i])
                               : "Pending"}};
    if (tx.result.decision) j["decision"] = acl::ToJson(*tx.result.decision);
    txs.push_back(std::move(j));
  }
  Json j = {{"height", block.header.height},
            {"prevHash", HashHex(block.header.prev_hash)},
            {"dataHash", HashHex(block.header.data_hash)},
            {"blockHash", HashHex(block.header.block_hash)},
            {"timestamp", FormatRfc3339(block.header.timestamp)},
            {"transactions", txs},
            {"raw", ToBase64(EncodeBlock(block))}};
  if (!block.config.empty()) j["config"] = block.config;
  return j;
}

struct Gateway::Impl {
  struct Session {
    IdentityCard card;
    Timestamp expires;
  };
  struct Challenge {
    std::string card_id;
    Timestamp expires;
  };
  struct Caller {
    IdentityCard card;
    Participant participant;
  };

  Impl(Network& n, SigningKey ca, GatewayOptions o)
      : network(n), ca_key(std::move(ca)), options(std::move(o)) {}

  Network& network;
  SigningKey ca_key;
  GatewayOptions options;
  httplib::Server server;
  std::thread listener;
  std::thread webhook;
  std::atomic<bool> stopping{false};
  std::atomic<uint64_t> webhook_attempts{0};
  int port = 0;

  std::mutex mu;
  std::map<std::string, Session> sessions;
  std::map<std::string, Challenge> challenges;

  Peer& peer() { return network.gateway_peer(); }

  std::optional<Participant> LookupParticipant(const WorldState& state,
                                               const std::string& id) {
    auto vv = state.Read(chaincode::keys::Participant(id));
    if (!vv) return std::nullopt;
    auto j = ParseJson(vv->value);
    if (!j.ok()) return std::nullopt;
    auto p = ParticipantFromJson(*j);
    if (!p.ok()) return std::nullopt;
    return *p;
  }

  // Role and revocation are re-read from committed state on every call.
  absl::StatusOr<Caller> Authenticate(const httplib::Request& req) {
    std::string token;
    const std::string auth = req.get_header_value("Authorization");
    if (absl::StartsWith(auth, "Bearer ")) {
      token = auth.substr(7);
    } else if (req.has_param("token")) {
      token = req.get_param_value("token");
    }
    if (token.empty()) return absl::UnauthenticatedError("NoSession: missing bearer token");
    IdentityCard card;
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = sessions.find(token);
      if (it == sessions.end() || it->second.expires < Now()) {
        if (it != sessions.end()) sessions.erase(it);
        return absl::UnauthenticatedError("NoSession: unknown or expired token");
      }
      card = it->second.card;
    }
    auto state = peer().state();
    if (state->Read(chaincode::keys::RevokedCard(card.card_id))) {
      std::lock_guard<std::mutex> lock(mu);
      sessions.erase(token);
      return absl::UnauthenticatedError(absl::StrCat("RevokedCard: ", card.card_id));
    }
    auto participant = LookupParticipant(*state, card.participant_id);
    if (!participant) {
      return absl::UnauthenticatedError(
          absl::StrCat("UnknownParticipant: ", card.participant_id));
    }
    return Caller{std::move(card), *std::move(participant)};
  }

  absl::Status CheckCardUsable(const IdentityCard& card) {
    if (!VerifyCard(card, ca_key.public_key)) {
      return absl::UnauthenticatedError("BadSignature: card certificate");
    }
    auto state = peer().state();
    if (state->Read(chaincode::keys::RevokedCard(card.card_id))) {
      return absl::UnauthenticatedError(absl::StrCat("RevokedCard: ", card.card_id));
    }
    if (!LookupParticipant(*state, card.participant_id)) {
      return absl::UnauthenticatedError(
          absl::StrCat("UnknownParticipant: ", card.participant_id));
    }
    return absl::OkStatus();
  }

  void HandleSession(const httplib::Request& req, httplib::Response& res) {
    auto body = ParseJson(req.body);
    if (!body.ok() || !body->is_object() || !body->contains("card")) {
      return ReplyError(res, 422, "MalformedBody", "expected {card, ...}");
    }
    auto card = CardFromJson((*body)["card"]);
    if (!card.ok()) return ReplyError(res, 422, "MalformedBody", std::string(card.status().message()));
    if (auto st = CheckCardUsable(*card); !st.ok()) return ReplyStatus(res, st);

    if (!body->contains("signature")) {
      std::string challenge = ToBase64(RandomBytes(32));
      std::lock_guard<std::mutex> lock(mu);
      challenges[challenge] = {card->card_id, Now() + std::chrono::minutes(5)};
      return Reply(res, 200, {{"challenge", challenge}});
    }
    const std::string challenge = body->value("challenge", "");
    auto sig = FromBase64(body->value("signature", ""));
    if (!sig.ok()) return ReplyError(res, 422, "MalformedBody", "signature must be base64");
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = challenges.find(challenge);
      bool fresh = it != challenges.end() && it->second.card_id == card->card_id &&
                   it->second.expires >= Now();
      if (it != challenges.end()) challenges.erase(it);  // single use
      if (!fresh) return ReplyError(res, 401, "BadChallenge", "unknown or expired challenge");
    }
    if (!VerifyPayload(card->public_key, SessionChallengeBytes(challenge), *sig)) {
      return ReplyError(res, 401, "BadSignature", "challenge signature");
    }
    auto participant = LookupParticipant(*peer().state(), card->participant_id);
    std::string token = ToHex(RandomBytes(32));
    Timestamp expires = Now() + std::chrono::duration_cast<std::chrono::milliseconds>(
                                    options.session_ttl);
    {
      std::lock_guard<std::mutex> lock(mu);
      sessions[token] = {*card, expires};
    }
    Json out = {{"token", token},
                {"cardId", card->card_id},
                {"participantId", card->participant_id},
                {"role", RoleName(participant->role)},
                {"expiresAt", FormatRfc3339(expires)}};
    if (participant->department_id) out["departmentId"] = *participant->department_id;
    Reply(res, 200, out);
  }

  void HandleTx(const Endpoint& ep, const httplib::Request& req,
                httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    auto body = ParseJson(req.body);
    if (!body.ok() || !body->is_object()) {
      return ReplyError(res, 422, "MalformedBody", "expected a JSON object");
    }
    Json fields = *body;
    auto nonce = FromBase64(fields.value("nonce", ""));
    auto sig = FromBase64(fields.value("signature", ""));
    auto at = ParseRfc3339(fields.value("proposedAt", ""));
    if (!nonce.ok() || nonce->empty() || !sig.ok() || !at.ok()) {
      return ReplyError(res, 422, "MalformedBody",
                        "nonce, proposedAt and signature are required");
    }
    const auto skew = std::chrono::abs(*at - Now());
    if (skew > options.max_clock_skew) {
      return ReplyError(res, 422, "ClockSkew", "proposedAt too far from gateway time");
    }
    fields.erase("nonce");
    fields.erase("signature");
    fields.erase("proposedAt");
    Json payload_json;
    if (ep.entity != nullptr) {
      payload_json = {{"type", ep.type}, {ep.entity, fields}};
    } else {
      payload_json = fields;
      payload_json["type"] = ep.type;
    }
    auto payload = chaincode::PayloadFromJson(payload_json);
    if (!payload.ok()) return ReplyError(res, 422, "MalformedBody", std::string(payload.status().message()));

    Proposal proposal;
    proposal.payload = *std::move(payload);
    proposal.card = caller->card;
    proposal.nonce = *std::move(nonce);
    proposal.proposed_at = *at;
    proposal.client_signature = *std::move(sig);
    auto outcome = network.SubmitAndWait(proposal);
    if (!outcome.ok()) return ReplyStatus(res, outcome.status());
    const chaincode::Response& response = outcome->result.response;
    if (!response.ok()) {
      return Reply(res, HttpStatusFor(response.code),
                   {{"error", chaincode::AppErrorName(response.code)},
                    {"message", response.message},
                    {"status", HttpStatusFor(response.code)},
                    {"txId", outcome->tx_id}});
    }
    Json events = Json::array();
    for (const auto& e : outcome->result.events) events.push_back(chaincode::ToJson(e));
    Json out = {{"txId", outcome->tx_id},
                {"valid", outcome->validity == TxValidity::kValid},
                {"validity", ValidityName(outcome->validity)},
                {"blockHeight", outcome->block_height},
                {"txOffset", outcome->tx_offset},
                {"attempts", outcome->attempts},
                {"events", events}};
    if (outcome->result.decision) {
      out["decision"] = acl::OperationName(outcome->result.decision->outcome);
      out["explain"] = acl::ToJson(*outcome->result.decision);
    }
    if (outcome->validity != TxValidity::kValid) {
      out["error"] = ValidityName(outcome->validity);
      return Reply(res, 500, out);
    }
    Reply(res, 200, out);
  }

  void HandleIssueCard(const httplib::Request& req, httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    if (caller->participant.role != Role::kAdmin) {
      return ReplyError(res, 403, "Unauthorized", "only an Admin issues cards");
    }
    auto body = ParseJson(req.body);
    if (!body.ok() || !body->is_object()) {
      return ReplyError(res, 422, "MalformedBody", "expected {participantId}");
    }
    auto state = peer().state();
    auto card = IssueCard(
        body->value("participantId", ""), ca_key,
        [&](std::string_view id) {
          return LookupParticipant(*state, std::string(id)).has_value();
        });
    if (!card.ok()) return ReplyStatus(res, card.status());
    Reply(res, 200, ToJson(*card));
  }

  void HandleHistorian(const httplib::Request& req, httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    HistorianFilter filter;
    if (req.has_param("participant")) filter.participant_id = req.get_param_value("participant");
    if (req.has_param("type")) filter.transaction_type = req.get_param_value("type");
    for (const char* name : {"from", "to"}) {
      if (!req.has_param(name)) continue;
      auto t = ParseRfc3339(req.get_param_value(name));
      if (!t.ok()) return ReplyError(res, 422, "MalformedQuery", std::string(t.status().message()));
      (std::string(name) == "from" ? filter.from : filter.to) = *t;
    }
    if (req.has_param("limit")) {
      try {
        filter.limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        return ReplyError(res, 422, "MalformedQuery", "limit must be a number");
      }
    }
    const Role role = caller->participant.role;
    if (role != Role::kAdmin && role != Role::kCeo) {
      const std::string& self = caller->participant.participant_id;
      if (filter.participant_id && *filter.participant_id != self) {
        return Reply(res, 200, {{"records", Json::array()}, {"count", 0}});
      }
      filter.participant_id = self;
    }
    Json records = Json::array();
    for (const HistorianRecord& r : peer().historian().Query(filter)) {
      records.push_back(ToJson(r));
    }
    Reply(res, 200, {{"records", records}, {"count", records.size()}});
  }

  void HandleStateList(const std::string& prefix, const httplib::Request& req,
                       httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    Json out = Json::array();
    for (const StateEntry& e : peer().state()->RangeRead(prefix)) {
      auto j = ParseJson(e.second.value);
      if (j.ok()) out.push_back(*j);
    }
    Reply(res, 200, out);
  }

  void HandleGrants(const httplib::Request& req, httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    std::string prefix = "dyn/";
    if (req.has_param("participant")) {
      prefix = absl::StrCat(prefix, req.get_param_value("participant"), "/");
    }
    Json out = Json::array();
    for (const StateEntry& e : peer().state()->RangeRead(prefix)) {
      auto j = ParseJson(e.second.value);
      if (!j.ok()) continue;
      (*j)["seq"] = chaincode::SeqForVersion(e.second.version,
                                             network.config().max_block_size);
      (*j)["version"] = {{"block", e.second.version.block},
                         {"tx", e.second.version.tx}};
      out.push_back(*j);
    }
    Reply(res, 200, out);
  }

  void HandleStream(const httplib::Request& req, httplib::Response& res) {
    auto caller = Authenticate(req);
    if (!caller.ok()) return ReplyStatus(res, caller.status());
    EventFilter filter;
    if (req.has_param("kinds") && !req.get_param_value("kinds").empty()) {
      for (absl::string_view k : absl::StrSplit(req.get_param_value("kinds"), ',')) {
        auto kind = chaincode::ParseEventKind(std::string(k));
        if (!kind.ok()) return ReplyError(res, 422, "MalformedQuery", std::string(kind.status().message()));
        filter.kinds.insert(*kind);
      }
    }
    if (req.has_param("place")) filter.place_id = req.get_param_value("place");
    std::optional<EventCoord> resume;
    std::string last = req.get_header_value("Last-Event-ID");
    if (last.empty() && req.has_param("after")) last = req.get_param_value("after");
    if (!last.empty()) {
      resume = ParseEventId(last);
      if (!resume) return ReplyError(res, 422, "MalformedQuery", "bad event id");
    }
    size_t limit = 0;
    if (req.has_param("limit")) {
      try {
        limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        return ReplyError(res, 422, "MalformedQuery", "limit must be a number");
      }
    }
    EventBus& bus = peer().events();
    const std::string sub = bus.Subscribe(filter, resume);
    auto sent = std::make_shared<size_t>(0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, &bus, sub, sent, limit](size_t, httplib::DataSink& sink) {
          if (stopping) return false;
          auto events = bus.WaitAndPoll(sub, 64, std::chrono::milliseconds(500));
          if (!events.ok()) return false;
          std::string chunk;
          for (const CommittedEvent& e : *events) {
            absl::StrAppend(&chunk, "id: ", EventId(e.coord), "\nevent: ",
                            std::string(chaincode::EventKindName(e.event.kind)),
                            "\ndata: ", CanonicalJson(EventJson(e)), "\n\n");
            ++*sent;
            if (limit > 0 && *sent >= limit) break;
          }
          if (chunk.empty()) chunk = ": keepalive\n\n";
          if (!sink.write(chunk.data(), chunk.size())) return false;
          if (limit > 0 && *sent >= limit) {
            sink.done();
          }
          return true;
        },
        [&bus, sub](bool) { bus.Unsubscribe(sub).IgnoreError(); });
  }

  void RunWebhook() {
    EventBus& bus = peer().events();
    std::optional<EventCoord> after;
    if (auto all = bus.AllEvents(); !all.empty()) after = all.back().coord;
    const std::string sub = bus.Subscribe(
        EventFilter{{chaincode::EventKind::kIntrusionAlert}, std::nullopt}, after);
    const ParsedUrl url = SplitUrl(*options.webhook_url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(2);
    client.set_read_timeout(5);
    while (!stopping) {
      auto events = bus.WaitAndPoll(sub, 16, std::chrono::milliseconds(200));
      if (!events.ok()) break;
      for (const CommittedEvent& e : *events) {
        ++webhook_attempts;
        // Best effort: one POST per alert, no retry.
        client.Post(url.path, CanonicalJson(EventJson(e)), kJson);
      }
    }
    bus.Unsubscribe(sub).IgnoreError();
  }

  void Routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers",
                     "Authorization, Content-Type, Last-Event-ID");
      res.status = 204;
    });
    server.Post("/api/session", [this](const auto& req, auto& res) {
      HandleSession(req, res);
    });
    server.Get("/api/session/me", [this](const auto& req, auto& res) {
      auto caller = Authenticate(req);
      if (!caller.ok()) return ReplyStatus(res, caller.status());
      Json out = ToJson(caller->participant);
      out["cardId"] = caller->card.card_id;
      Reply(res, 200, out);
    });
    for (const Endpoint& ep : kEndpoints) {
      server.Post(ep.path, [this, &ep](const auto& req, auto& res) {
        HandleTx(ep, req, res);
      });
    }
    server.Post("/api/cards", [this](const auto& req, auto& res) {
      HandleIssueCard(req, res);
    });
    server.Get("/api/historian", [this](const auto& req, auto& res) {
      HandleHistorian(req, res);
    });
    const std::pair<const char*, const char*> lists[] = {
        {"/api/state/places", "place/"},
        {"/api/state/participants", "participant/"},
        {"/api/state/departments", "dept/"},
        {"/api/state/delegations", "deleg/"},
    };
    for (const auto& [path, prefix] : lists) {
      std::string p = prefix;
      server.Get(path, [this, p](const auto& req, auto& res) {
        HandleStateList(p, req, res);
      });
    }
    server.Get("/api/state/grants", [this](const auto& req, auto& res) {
      HandleGrants(req, res);
    });
    server.Get("/api/config", [this](const auto&, auto& res) {
      Reply(res, 200, ToJson(network.config()));
    });
    server.Get("/api/chain", [this](const auto&, auto& res) {
      Json peers = Json::array();
      for (Peer* p : network.peers()) {
        peers.push_back({{"peerId", p->identity().peer_id},
                         {"orgId", p->identity().org_id},
                         {"height", p->height()},
                         {"tipHash", HashHex(p->tip_hash())},
                         {"stateHash", HashHex(p->StateHash())}});
      }
      Reply(res, 200, {{"height", peer().height()},
                       {"tipHash", HashHex(peer().tip_hash())},
                       {"stateHash", HashHex(peer().StateHash())},
                       {"peers", peers}});
    });
    server.Get(R"(/api/blocks/(\d+))", [this](const auto& req, auto& res) {
      uint64_t h = 0;
      try {
        h = std::stoull(req.matches[1].str());
      } catch (const std::exception&) {
        return ReplyError(res, 422, "MalformedQuery", "bad height");
      }
      auto block = peer().BlockAt(h);
      if (!block) return ReplyError(res, 404, "NotFound", absl::StrCat("no block ", h));
      Reply(res, 200, BlockToJson(*block));
    });
    server.Get("/api/chain/verify", [this](const auto&, auto& res) {
      Reply(res, 200, ToJson(peer().VerifyLedger()));
    });
    server.Get("/api/events/stream", [this](const auto& req, auto& res) {
      HandleStream(req, res);
    });
  }
};

Gateway::Gateway(Network& network, SigningKey ca_key, GatewayOptions options)
    : impl_(std::make_unique<Impl>(network, std::move(ca_key), std::move(options))) {}

Gateway::~Gateway() { Stop(); }

absl::StatusOr<int> Gateway::Start() {
  Impl& g = *impl_;
  const int threads = g.options.worker_threads;
  g.server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  g.Routes();
  if (g.options.port == 0) {
    g.port = g.server.bind_to_any_port(g.options.host);
  } else {
    g.port = g.server.bind_to_port(g.options.host, g.options.port) ? g.options.port : -1;
  }
  if (g.port <= 0) {
    return absl::UnavailableError(absl::StrCat("cannot bind ", g.options.host, ":",
                                               g.options.port));
  }
  g.listener = std::thread([&g] { g.server.listen_after_bind(); });
  g.server.wait_until_ready();
  if (g.options.webhook_url) g.webhook = std::thread([&g] { g.RunWebhook(); });
  return g.port;
}

void Gateway::Stop() {
  Impl& g = *impl_;
  if (g.stopping.exchange(true)) return;
  g.server.stop();
  if (g.listener.joinable()) g.listener.join();
  if (g.webhook.joinable()) g.webhook.join();
}

int Gateway::port() const { return impl_->port; }

std::string Gateway::url() const {
  return absl::StrCat("http://", impl_->options.host, ":", impl_->port);
}

uint64_t Gateway::webhook_attempts() const { return impl_->webhook_attempts; }

GatewayClient::GatewayClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

absl::StatusOr<HttpResponse> GatewayClient::Raw(const std::string& method,
                                                const std::string& path,
                                                const std::optional<Json>& body) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (token_) headers.emplace("Authorization", absl::StrCat("Bearer ", *token_));
  httplib::Result result =
      method == "GET"
          ? client.Get(path, headers)
          : client.Post(path, headers, body ? CanonicalJson(*body) : "{}", kJson);
  if (!result) {
    return absl::UnavailableError(absl::StrCat(
        "TargetUnreachable: ", base_url_, " (", httplib::to_string(result.error()), ")"));
  }
  HttpResponse out;
  out.status = result->status;
  auto j = ParseJson(result->body);
  out.body = j.ok() ? *j : Json(result->body);
  return out;
}

absl::Status GatewayClient::StatusFromResponse(const HttpResponse& r) {
  if (r.status >= 200 && r.status < 300) return absl::OkStatus();
  std::string name = r.body.is_object() ? r.body.value("error", "") : "";
  std::string msg = r.body.is_object() ? r.body.value("message", "") : r.body.dump();
  std::string text = absl::StrCat(name.empty() ? "HttpError" : name, ": ", msg);
  switch (r.status) {
    case 401:
      return absl::UnauthenticatedError(text);
    case 403:
      return absl::PermissionDeniedError(text);
    case 404:
      return absl::NotFoundError(text);
    case 409:
      return name == "MvccRetryExhausted" ? absl::AbortedError(text)
                                          : absl::AlreadyExistsError(text);
    case 422:
      return absl::InvalidArgumentError(text);
    case 503:
      return absl::UnavailableError(text);
    case 504:
      return absl::DeadlineExceededError(text);
    default:
      return absl::InternalError(absl::StrCat(r.status, " ", text));
  }
}

absl::StatusOr<Json> GatewayClient::Get(const std::string& path) {
  auto r = Raw("GET", path);
  if (!r.ok()) return r.status();
  if (auto st = StatusFromResponse(*r); !st.ok()) return st;
  return r->body;
}

absl::StatusOr<Json> GatewayClient::Post(const std::string& path, const Json& body) {
  auto r = Raw("POST", path, body);
  if (!r.ok()) return r.status();
  if (auto st = StatusFromResponse(*r); !st.ok()) return st;
  return r->body;
}

absl::Status GatewayClient::Login(const HolderCard& card) {
  token_.reset();
  auto challenge = Post("/api/session", {{"card", ToJson(card.card)}});
  if (!challenge.ok()) return challenge.status();
  const std::string c = challenge->value("challenge", "");
  auto session = Post("/api/session",
                      {{"card", ToJson(card.card)},
                       {"challenge", c},
                       {"signature", ToBase64(SignPayload(card.key, SessionChallengeBytes(c)))}});
  if (!session.ok()) return session.status();
  token_ = session->value("token", "");
  card_ = card;
  return absl::OkStatus();
}

std::string GatewayClient::EndpointFor(const chaincode::TransactionPayload& payload) {
  const std::string type = chaincode::PayloadTypeName(payload);
  for (const Endpoint& ep : kEndpoints) {
    if (type == ep.type) return ep.path;
  }
  return "/api/tx/unknown";
}

Json GatewayClient::SignedBody(const HolderCard& card,
                               const chaincode::TransactionPayload& payload,
                               Timestamp proposed_at) {
  const Bytes nonce = RandomBytes(16);
  Json payload_json = chaincode::ToJson(payload);
  const std::string type = payload_json.value("type", "");
  Json body = payload_json;
  body.erase("type");
  for (const Endpoint& ep : kEndpoints) {
    if (type == ep.type && ep.entity != nullptr) body = payload_json[ep.entity];
  }
  body["nonce"] = ToBase64(nonce);
  body["proposedAt"] = FormatRfc3339(proposed_at);
  body["signature"] = ToBase64(SignPayload(
      card.key,
      ProposalSigningBytes(payload, card.card.card_id, nonce, proposed_at)));
  return body;
}

absl::StatusOr<HttpResponse> GatewayClient::SubmitRaw(
    const chaincode::TransactionPayload& payload) {
  if (!card_) return absl::FailedPreconditionError("not logged in");
  return Raw("POST", EndpointFor(payload), SignedBody(*card_, payload));
}

absl::StatusOr<Json> GatewayClient::Submit(const chaincode::TransactionPayload& payload) {
  auto r = SubmitRaw(payload);
  if (!r.ok()) return r.status();
  if (auto st = StatusFromResponse(*r); !st.ok()) return st;
  return r->body;
}

namespace {

class HttpTargetImpl final : public bench::Target {
 public:
  explicit HttpTargetImpl(std::string url) : url_(std::move(url)) {}

  absl::StatusOr<bench::TargetResult> Submit(
      const HolderCard& card, const chaincode::TransactionPayload& payload) override {
    GatewayClient* client = nullptr;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = clients_.find(card.card.card_id);
      if (it == clients_.end()) {
        auto c = std::make_unique<GatewayClient>(url_);
        if (auto st = c->Login(card); !st.ok()) return st;
        it = clients_.emplace(card.card.card_id, std::move(c)).first;
      }
      client = it->second.get();
    }
    auto r = client->SubmitRaw(payload);
    if (!r.ok()) return r.status();
    bench::TargetResult out;
    out.tx_id = r->body.is_object() ? r->body.value("txId", "") : "";
    if (r->status == 200) {
      out.committed_valid = r->body.value("valid", false);
    } else {
      out.error = std::string(GatewayClient::StatusFromResponse(*r).message());
    }
    return out;
  }

  absl::StatusOr<HolderCard> Enroll(const HolderCard& admin,
                                    const std::string& participant_id) override {
    GatewayClient client(url_);
    if (auto st = client.Login(admin); !st.ok()) return st;
    auto j = client.Post("/api/cards", {{"participantId", participant_id}});
    if (!j.ok()) return j.status();
    return HolderCardFromJson(*j);
  }

 private:
  std::string url_;
  std::mutex mu_;
  // GatewayClient is stateless apart from its token, so one per card is
  // shared across that card's concurrent submissions.
  std::map<std::string, std::unique_ptr<GatewayClient>> clients_;
};

}  // namespace

std::unique_ptr<bench::Target> HttpTarget(std::string base_url) {
  return std::make_unique<HttpTargetImpl>(std::move(base_url));
}

}  // namespace doorledger
