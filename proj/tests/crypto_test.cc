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
#include "doorledger/codec.h"
#include "doorledger/crypto.h"
#include "doorledger/domain.h"

namespace doorledger {
namespace {

Bytes Hex(std::string_view s) { return *FromHex(s); }

TEST_CASE("sha256 known vectors") {
  CHECK(HashHex(Sha256("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(HashHex(Sha256("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ed25519 rfc8032 test 1") {
  SigningKey key = SigningKeyFromSeed(
      Hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"));
  CHECK(ToHex(key.public_key.bytes) ==
        "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  Signature sig = SignPayload(key, {});
  CHECK(ToHex(sig) ==
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb882"
        "1590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  CHECK(VerifyPayload(key.public_key, {}, sig));
  Bytes one = {0x01};
  CHECK_FALSE(VerifyPayload(key.public_key, one, sig));
}

TEST_CASE("secret key round trip") {
  SigningKey key = GenerateSigningKey();
  auto back = SigningKeyFromSecret(key.secret);
  REQUIRE(back.ok());
  CHECK(back->public_key == key.public_key);
  Bytes short_secret(10, 0);
  CHECK_FALSE(SigningKeyFromSecret(short_secret).ok());
}

TEST_CASE("hex and base64") {
  Bytes b = {0x00, 0xff, 0x10, 0x7a};
  CHECK(ToHex(b) == "00ff107a");
  CHECK(*FromHex("00FF107a") == b);
  CHECK_FALSE(FromHex("abc").ok());
  CHECK_FALSE(FromHex("zz").ok());
  CHECK(ToBase64(AsBytes("hello")) == "aGVsbG8=");
  CHECK(AsString(*FromBase64("aGVsbG8=")) == "hello");
  CHECK_FALSE(FromBase64("!!").ok());
}

TEST_CASE("rfc3339") {
  Timestamp t = FromMillis(1767225600123);
  CHECK(FormatRfc3339(t) == "2026-01-01T00:00:00.123Z");
  CHECK(*ParseRfc3339("2026-01-01T00:00:00.123Z") == t);
  CHECK(*ParseRfc3339("2026-01-01T00:00:00Z") == FromMillis(1767225600000));
  CHECK_FALSE(ParseRfc3339("yesterday").ok());
  CHECK(MinuteOfDay(*ParseRfc3339("2026-01-01T18:30:00Z")) == 18 * 60 + 30);
}

TEST_CASE("canonical json sorts keys and strips whitespace") {
  Json j = Json::parse(R"({ "b": 1, "a": [true, null], "c": {"z": "x", "y": 2} })");
  CHECK(CanonicalJson(j) == R"({"a":[true,null],"b":1,"c":{"y":2,"z":"x"}})");
}

TEST_CASE("encoder is big-endian with u32 length prefixes") {
  Encoder e;
  e.U32(0x01020304).U64(5).Str("ab").U8(7);
  CHECK(ToHex(e.bytes()) == "01020304" "0000000000000005" "000000026162" "07");

  Decoder d(e.bytes());
  CHECK(d.U32() == 0x01020304);
  CHECK(d.U64() == 5);
  CHECK(d.Str() == "ab");
  CHECK(d.U8() == 7);
  d.ExpectEnd();
}

TEST_CASE("decoder rejects truncation, overlong lengths and trailing bytes") {
  Bytes truncated = {0x00, 0x00, 0x01};
  Decoder d1(truncated);
  CHECK_THROWS_AS(d1.U32(), DecodeError);

  Bytes overlong = {0x00, 0x00, 0x00, 0x09, 0x61};
  Decoder d2(overlong);
  CHECK_THROWS_AS(d2.Str(), DecodeError);

  Bytes trailing = {0x07, 0x00};
  Decoder d3(trailing);
  CHECK(d3.U8() == 7);
  CHECK_THROWS_AS(d3.ExpectEnd(), DecodeError);

  Bytes bad_bool = {0x02};
  Decoder d4(bad_bool);
  CHECK_THROWS_AS(d4.Bool(), DecodeError);
}

TEST_CASE("issued cards verify and any single-byte mutation breaks them") {
  SigningKey ca = GenerateSigningKey();
  auto holder = IssueCard("alice", ca, [](std::string_view id) { return id == "alice"; });
  REQUIRE(holder.ok());
  const IdentityCard& card = holder->card;
  CHECK(VerifyCard(card, ca.public_key));
  CHECK_FALSE(VerifyCard(card, GenerateSigningKey().public_key));

  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    IdentityCard m = card;
    auto flip = [&](auto& container) {
      std::uniform_int_distribution<size_t> pos(0, container.size() - 1);
      std::uniform_int_distribution<int> mask(1, 255);
      size_t p = pos(rng);
      container[p] = static_cast<std::remove_reference_t<decltype(container[p])>>(
          container[p] ^ mask(rng));
    };
    switch (i % 4) {
      case 0: flip(m.card_id); break;
      case 1: flip(m.participant_id); break;
      case 2: flip(m.public_key.bytes); break;
      case 3: flip(m.certificate); break;
    }
    CHECK_FALSE(VerifyCard(m, ca.public_key));
  }
}

TEST_CASE("cards are only issued for registered participants") {
  SigningKey ca = GenerateSigningKey();
  auto r = IssueCard("ghost", ca, [](std::string_view) { return false; });
  CHECK(r.status().code() == absl::StatusCode::kNotFound);
}

TEST_CASE("holder card json round trip and key mismatch") {
  SigningKey ca = GenerateSigningKey();
  auto holder = IssueCard("alice", ca, [](std::string_view) { return true; });
  REQUIRE(holder.ok());
  holder->gateway = "http://127.0.0.1:9";
  auto back = HolderCardFromJson(ToJson(*holder));
  REQUIRE(back.ok());
  CHECK(back->card == holder->card);
  CHECK(back->key.secret == holder->key.secret);
  CHECK(back->gateway == holder->gateway);

  Json j = ToJson(*holder);
  j["privateKey"] = ToBase64(GenerateSigningKey().secret);
  CHECK_FALSE(HolderCardFromJson(j).ok());
}

TEST_CASE("participant validation") {
  CHECK(ParseRole("CEO").ok());
  CHECK_FALSE(ParseRole("Janitor").ok());
  auto p = ParticipantFromJson(
      Json::parse(R"({"participantId":"x","displayName":"X","role":"CEO"})"));
  CHECK_FALSE(p.ok());  // a CEO needs a department
  auto q = ParticipantFromJson(Json::parse(
      R"({"participantId":"x","displayName":"X","role":"CEO","departmentId":"d"})"));
  REQUIRE(q.ok());
  CHECK(ToJson(*q)["departmentId"] == "d");
}

}  // namespace
}  // namespace doorledger
