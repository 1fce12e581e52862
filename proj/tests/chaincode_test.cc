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

#include <random>

#include "doctest.h"
#include "doorledger/chaincode.h"
#include "doorledger/genesis.h"
#include "doorledger/validation.h"
#include "oracles.h"
#include "support.h"

namespace doorledger::chaincode {
namespace {

using acl::Decision;
using acl::Operation;

// World state plus a fake commit counter; each Run commits at the next
// (block, tx) slot when the response is Ok.
class Sandbox {
 public:
  Sandbox() {
    auto d = testing::StandardDeployment();
    config_ = ToChainConfig(d.genesis);
    auto genesis = BuildGenesisBlock(d.genesis);
    state_ = *Replay({*genesis});
  }

  ExecutionResult Run(const std::string& who, const TransactionPayload& payload,
                      Timestamp at = *ParseRfc3339("2026-03-02T12:00:00Z")) {
    IdentityCard card;
    card.card_id = "card-" + who;
    card.participant_id = who;
    Submission s{card, "tx" + std::to_string(next_), at};
    ExecutionResult r = Execute(s, payload, state_, config_);
    if (r.response.ok()) {
      Version v{1 + next_ / 10, static_cast<uint32_t>(next_ % 10)};
      for (const KeyWrite& w : r.rwset.writes) state_.Apply(w.key, w.value, v);
      ++next_;
    }
    return r;
  }

  const WorldState& state() const { return state_; }
  ChainConfig& config() { return config_; }

 private:
  ChainConfig config_;
  WorldState state_;
  uint64_t next_ = 0;
};

std::vector<EventKind> Kinds(const ExecutionResult& r) {
  std::vector<EventKind> out;
  for (const auto& e : r.events) out.push_back(e.kind);
  return out;
}

TEST_CASE("admin grant writes the dynamic key and emits AccessGrantChanged") {
  Sandbox sb;
  auto r = sb.Run("admin", GrantAccess{"alice", "door-x1"});
  REQUIRE(r.response.ok());
  REQUIRE(r.rwset.writes.size() == 1);
  CHECK(r.rwset.writes[0].key == keys::Dynamic("alice", "door-x1"));
  CHECK(r.rwset.writes[0].key == "dyn/alice/door-x1");
  CHECK(Kinds(r) == std::vector{EventKind::kAccessGrantChanged});
}

TEST_CASE("grant authorization: employee, foreign CEO, unknown ids") {
  Sandbox sb;
  auto bob = sb.Run("bob", GrantAccess{"carol", "door-x1"});
  CHECK(bob.response.code == AppError::kUnauthorized);
  CHECK(bob.rwset.writes.empty());
  auto ceo = sb.Run("ceo-x", GrantAccess{"alice", "door-y1"});
  CHECK(ceo.response.code == AppError::kUnauthorized);
  CHECK(sb.Run("ceo-x", GrantAccess{"alice", "door-x1"}).response.ok());
  CHECK(sb.Run("admin", GrantAccess{"nobody", "door-x1"}).response.code == AppError::kNotFound);
  CHECK(sb.Run("admin", GrantAccess{"alice", "nowhere"}).response.code == AppError::kNotFound);
}

TEST_CASE("delegation lifecycle") {
  Sandbox sb;
  CHECK(sb.Run("manager", DelegateAuthority{"bob", "dept-x"}).response.code ==
        AppError::kUnauthorized);
  CHECK(sb.Run("ceo-y", DelegateAuthority{"bob", "dept-x"}).response.code ==
        AppError::kUnauthorized);

  auto d = sb.Run("ceo-x", DelegateAuthority{"bob", "dept-x"});
  REQUIRE(d.response.ok());
  CHECK(d.rwset.writes.at(0).key == "deleg/bob/dept-x");
  CHECK(Kinds(d) == std::vector{EventKind::kDelegationChanged});

  CHECK(sb.Run("bob", GrantAccess{"alice", "door-x1"}).response.ok());
  CHECK(sb.Run("bob", GrantAccess{"alice", "door-y1"}).response.code == AppError::kUnauthorized);
  // A delegate cannot delegate further.
  CHECK(sb.Run("bob", DelegateAuthority{"carol", "dept-x"}).response.code ==
        AppError::kUnauthorized);

  auto undo = sb.Run("ceo-x", RevokeDelegation{"bob", "dept-x"});
  REQUIRE(undo.response.ok());
  CHECK_FALSE(undo.rwset.writes.at(0).value.has_value());
  CHECK(sb.Run("bob", GrantAccess{"alice", "door-x1"}).response.code == AppError::kUnauthorized);

  CHECK(sb.Run("admin", DelegateAuthority{"ghost", "dept-x"}).response.code == AppError::kNotFound);
  CHECK(sb.Run("admin", DelegateAuthority{"bob", "dept-q"}).response.code == AppError::kNotFound);
}

TEST_CASE("check access after a grant allows and resets the counter") {
  Sandbox sb;
  REQUIRE(sb.Run("admin", GrantAccess{"alice", "door-x1"}).response.ok());
  auto r = sb.Run("alice", CheckAccess{"door-x1"});
  REQUIRE(r.response.ok());
  REQUIRE(r.decision.has_value());
  CHECK(r.decision->outcome == Operation::kAllow);
  CHECK(r.decision->source == Decision::Source::kDynamic);
  // The grant committed at (1, 0): seq = 1 * 10 + 0.
  CHECK(r.decision->seq == 10);
  CHECK(Kinds(r) == std::vector{EventKind::kAccessGranted});
  REQUIRE(r.rwset.writes.size() == 1);
  CHECK(r.rwset.writes[0].key == "denials/alice/door-x1");
  CHECK(r.rwset.writes[0].value == R"({"count":0})");
}

TEST_CASE("three consecutive denials raise one alert and reset the counter") {
  Sandbox sb;
  for (int i = 1; i <= 3; ++i) {
    auto r = sb.Run("bob", CheckAccess{"door-x2"});
    REQUIRE(r.response.ok());
    CHECK(r.decision->outcome == Operation::kDeny);
    if (i < 3) {
      CHECK(Kinds(r) == std::vector{EventKind::kAccessDenied});
      CHECK(r.rwset.writes.at(0).value == CanonicalJson({{"count", i}}));
    } else {
      CHECK(Kinds(r) == std::vector{EventKind::kAccessDenied, EventKind::kIntrusionAlert});
      CHECK(r.events[1].count == 3);
      CHECK(r.events[1].place_id == "door-x2");
      CHECK(r.rwset.writes.at(0).value == R"({"count":0})");
    }
  }
}

TEST_CASE("denial counter matches the scalar oracle on random sequences") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Sandbox sb;
    std::string seq;
    int alerts = 0;
    for (int i = 0; i < 15; ++i) {
      const bool allow = rng() % 3 == 0;
      REQUIRE(sb.Run("admin", allow ? TransactionPayload(GrantAccess{"bob", "door-x2"})
                                    : TransactionPayload(RevokeAccess{"bob", "door-x2"}))
                  .response.ok());
      auto r = sb.Run("bob", CheckAccess{"door-x2"});
      seq.push_back(r.decision->outcome == Operation::kAllow ? 'A' : 'D');
      for (const auto& e : r.events) alerts += e.kind == EventKind::kIntrusionAlert;
    }
    CAPTURE(seq);
    CHECK(alerts == oracle::AlertsFor(seq, 3));
  }
}

TEST_CASE("deny allow deny raises nothing") {
  Sandbox sb;
  int alerts = 0;
  auto count = [&](const ExecutionResult& r) {
    for (const auto& e : r.events) alerts += e.kind == EventKind::kIntrusionAlert;
  };
  count(sb.Run("bob", CheckAccess{"door-x2"}));
  sb.Run("admin", GrantAccess{"bob", "door-x2"});
  count(sb.Run("bob", CheckAccess{"door-x2"}));
  sb.Run("admin", RevokeAccess{"bob", "door-x2"});
  count(sb.Run("bob", CheckAccess{"door-x2"}));
  count(sb.Run("bob", CheckAccess{"door-x2"}));
  CHECK(alerts == 0);
}

TEST_CASE("check of an unknown place is NotFound") {
  Sandbox sb;
  auto r = sb.Run("alice", CheckAccess{"door-404"});
  CHECK(r.response.code == AppError::kNotFound);
  CHECK(r.rwset.writes.empty());
}

TEST_CASE("static rules apply without an overlay") {
  Sandbox sb;
  auto ceo = sb.Run("ceo-x", CheckAccess{"door-x1"});
  CHECK(ceo.decision == Decision::Static(Operation::kAllow, "ceo-own-department"));
  auto foreign = sb.Run("ceo-x", CheckAccess{"door-y1"});
  CHECK(foreign.decision == Decision::DefaultDeny());
  auto day = sb.Run("manager", CheckAccess{"door-y1"}, *ParseRfc3339("2026-03-02T08:00:00Z"));
  CHECK(day.decision->outcome == Operation::kAllow);
  auto night = sb.Run("manager", CheckAccess{"door-y1"}, *ParseRfc3339("2026-03-02T23:00:00Z"));
  CHECK(night.decision->outcome == Operation::kDeny);
  // A revoke masks the static allow.
  REQUIRE(sb.Run("admin", RevokeAccess{"ceo-x", "door-x1"}).response.ok());
  CHECK(sb.Run("ceo-x", CheckAccess{"door-x1"}).decision->outcome == Operation::kDeny);
}

TEST_CASE("registration is Admin only and rejects duplicates") {
  Sandbox sb;
  auto place = sb.Run("admin", RegisterPlace{{"door-9", "Nine", "dept-x"}});
  REQUIRE(place.response.ok());
  CHECK(place.rwset.writes.at(0).key == "place/door-9");
  CHECK(sb.Run("admin", RegisterPlace{{"door-9", "Nine", "dept-x"}}).response.code ==
        AppError::kAlreadyExists);
  CHECK(sb.Run("admin", RegisterPlace{{"door-8", "Eight", "dept-q"}}).response.code ==
        AppError::kNotFound);
  CHECK(sb.Run("alice", RegisterParticipant{{"eve", "Eve", Role::kEmployee, {}}})
            .response.code == AppError::kUnauthorized);
  CHECK(sb.Run("ceo-x", RegisterPlace{{"door-7", "Seven", "dept-x"}}).response.code ==
        AppError::kUnauthorized);

  REQUIRE(sb.Run("admin", RegisterParticipant{{"ceo-z", "Z", Role::kCeo, "dept-z"}})
              .response.ok());
  CHECK(sb.Run("admin", RegisterDepartment{{"dept-z", "Z", "alice"}}).response.code ==
        AppError::kInvalidArgument);
  CHECK(sb.Run("admin", RegisterDepartment{{"dept-z", "Z", "ceo-z"}}).response.ok());
  CHECK(sb.Run("admin", RegisterDepartment{{"dept-z", "Z", "ceo-z"}}).response.code ==
        AppError::kAlreadyExists);
}

TEST_CASE("revoked cards cannot transact") {
  Sandbox sb;
  REQUIRE(sb.Run("admin", RevokeCard{"card-alice"}).response.ok());
  CHECK(sb.state().Read("revokedCard/card-alice").has_value());
  auto r = sb.Run("alice", CheckAccess{"door-x1"});
  CHECK(r.response.code == AppError::kUnauthorized);
  CHECK(sb.Run("admin", RevokeCard{"card-alice"}).response.code == AppError::kAlreadyExists);
}

TEST_CASE("unregistered submitters and unknown payload types") {
  Sandbox sb;
  CHECK(sb.Run("stranger", CheckAccess{"door-x1"}).response.code == AppError::kUnauthorized);
  auto r = sb.Run("admin", UnknownPayload{"TransferAsset", Json::object()});
  CHECK(r.response.code == AppError::kUnknownTransactionType);
  CHECK(r.rwset.writes.empty());
}

TEST_CASE("execution is deterministic and reads are recorded with versions") {
  Sandbox sb;
  sb.Run("admin", GrantAccess{"alice", "door-x1"});
  IdentityCard card;
  card.card_id = "c";
  card.participant_id = "alice";
  Submission s{card, "t", *ParseRfc3339("2026-03-02T12:00:00Z")};
  auto a = Execute(s, CheckAccess{"door-x1"}, sb.state(), sb.config());
  auto b = Execute(s, CheckAccess{"door-x1"}, sb.state(), sb.config());
  CHECK(a == b);
  CHECK(ResultBytes(a) == ResultBytes(b));
  bool saw_dyn = false;
  for (const auto& read : a.rwset.reads) {
    if (read.key == "dyn/alice/door-x1") {
      saw_dyn = true;
      CHECK(read.version == Version{1, 0});
    }
  }
  CHECK(saw_dyn);
  CHECK(std::is_sorted(a.rwset.reads.begin(), a.rwset.reads.end(),
                       [](const auto& x, const auto& y) { return x.key < y.key; }));
}

TEST_CASE("payload json round trip") {
  std::vector<TransactionPayload> all = {
      RegisterParticipant{{"p", "P", Role::kCeo, "d"}},
      RegisterPlace{{"door", "Door", "d"}},
      RegisterDepartment{{"d", "D", "p"}},
      GrantAccess{"p", "door"},
      RevokeAccess{"p", "door"},
      DelegateAuthority{"p", "d"},
      RevokeDelegation{"p", "d"},
      CheckAccess{"door"},
      RevokeCard{"c"}};
  for (const auto& p : all) {
    Json j = ToJson(p);
    CAPTURE(j.dump());
    CHECK(j["type"] == PayloadTypeName(p));
    auto back = PayloadFromJson(j);
    REQUIRE(back.ok());
    CHECK(CanonicalJson(ToJson(*back)) == CanonicalJson(j));
  }
  auto unknown = PayloadFromJson(Json::parse(R"({"type":"Teleport","to":"mars"})"));
  REQUIRE(unknown.ok());
  CHECK(std::holds_alternative<UnknownPayload>(*unknown));
  CHECK_FALSE(PayloadFromJson(Json::parse(R"({"type":"GrantAccess"})")).ok());
}

TEST_CASE("seq derives from the commit slot") {
  CHECK(SeqForVersion(Version{7, 3}, 10) == 73);
  CHECK(SeqForVersion(Version{0, 0}, 10) == 0);
}

}  // namespace
}  // namespace doorledger::chaincode
