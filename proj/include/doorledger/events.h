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

#ifndef DOORLEDGER_EVENTS_H_
#define DOORLEDGER_EVENTS_H_

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "doorledger/ledger.h"

namespace doorledger {

struct EventFilter {
  std::set<chaincode::EventKind> kinds;  // empty: all kinds
  std::optional<std::string> place_id;

  bool Matches(const chaincode::ChainEvent& e) const;
};

// Post-commit fan-out of events from Valid transactions. Memory only; the
// events are re-derivable from committed blocks.
class EventBus {
 public:
  // Called by the commit path once per block, in height order.
  void Publish(std::vector<CommittedEvent> events);

  // Delivery starts after `resume_after` when given (SSE resume), otherwise
  // from the beginning of the log.
  std::string Subscribe(EventFilter filter,
                        std::optional<EventCoord> resume_after = std::nullopt);
  absl::Status Unsubscribe(const std::string& id);

  // Next matching events in commit order, at most `max`. NotFound
  // (UnknownSubscription) for unknown ids.
  absl::StatusOr<std::vector<CommittedEvent>> Poll(const std::string& id,
                                                   size_t max);
  // Like Poll, but blocks up to `timeout` when nothing is pending.
  absl::StatusOr<std::vector<CommittedEvent>> WaitAndPoll(
      const std::string& id, size_t max, std::chrono::milliseconds timeout);

  std::vector<CommittedEvent> AllEvents() const;
  size_t size() const;

 private:
  struct Subscription {
    std::mutex mu;
    EventFilter filter;
    size_t next = 0;  // index into log_
  };

  std::shared_ptr<Subscription> Find(const std::string& id) const;
  std::vector<CommittedEvent> Collect(Subscription& sub, size_t max) const;

  mutable std::shared_mutex mu_;
  std::condition_variable_any published_;
  std::vector<CommittedEvent> log_;
  std::map<std::string, std::shared_ptr<Subscription>> subs_;
  uint64_t next_id_ = 1;
};

}  // namespace doorledger

#endif  // DOORLEDGER_EVENTS_H_
