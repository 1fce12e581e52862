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

#ifndef DOORLEDGER_GATEWAY_H_
#define DOORLEDGER_GATEWAY_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "doorledger/bench.h"
#include "doorledger/network.h"

namespace doorledger {

struct GatewayOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::optional<std::string> webhook_url;
  std::chrono::seconds max_clock_skew{300};
  std::chrono::seconds session_ttl{3600};
  int worker_threads = 32;
};

// HTTP front end of one network: sessions, signed transactions, state and
// historian views, blocks, chain verification and the event stream.
class Gateway {
 public:
  Gateway(Network& network, SigningKey ca_key, GatewayOptions options);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  absl::StatusOr<int> Start();
  void Stop();

  int port() const;
  std::string url() const;
  // Webhook POSTs attempted so far.
  uint64_t webhook_attempts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// 401 / 403 / 404 / 409 / 422 mapping shared by server and client.
int HttpStatusFor(const absl::Status& status);
int HttpStatusFor(chaincode::AppError error);

// "BadSignature: ..." -> "BadSignature"; otherwise the status code in
// CamelCase.
std::string ErrorName(const absl::Status& status);

// Bytes a card signs to answer a session challenge.
Bytes SessionChallengeBytes(std::string_view challenge);

Json BlockToJson(const Block& block);

struct HttpResponse {
  int status = 0;
  Json body;
};

class GatewayClient {
 public:
  explicit GatewayClient(std::string base_url);

  const std::string& base_url() const { return base_url_; }

  // Challenge-response login; keeps the bearer token.
  absl::Status Login(const HolderCard& card);
  const std::optional<std::string>& token() const { return token_; }

  absl::StatusOr<HttpResponse> Raw(const std::string& method,
                                   const std::string& path,
                                   const std::optional<Json>& body = std::nullopt);

  // Non-2xx responses become errors carrying the server's error name.
  absl::StatusOr<Json> Get(const std::string& path);
  absl::StatusOr<Json> Post(const std::string& path, const Json& body);

  // Signs `payload` with the logged-in card and posts it to its endpoint.
  absl::StatusOr<HttpResponse> SubmitRaw(const chaincode::TransactionPayload& payload);
  absl::StatusOr<Json> Submit(const chaincode::TransactionPayload& payload);

  static std::string EndpointFor(const chaincode::TransactionPayload& payload);
  static Json SignedBody(const HolderCard& card,
                         const chaincode::TransactionPayload& payload,
                         Timestamp proposed_at = Now());
  static absl::Status StatusFromResponse(const HttpResponse& response);

 private:
  std::string base_url_;
  std::optional<HolderCard> card_;
  std::optional<std::string> token_;
};

std::unique_ptr<bench::Target> HttpTarget(std::string base_url);

}  // namespace doorledger

#endif  // DOORLEDGER_GATEWAY_H_
