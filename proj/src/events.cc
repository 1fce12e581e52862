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

#include "doorledger/events.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace doorledger {

bool EventFilter::Matches(const chaincode::ChainEvent& e) const {
  if (!kinds.empty() && !kinds.contains(e.kind)) return false;
  if (place_id && e.place_id != place_id) return false;
  return true;
}

void EventBus::Publish(std::vector<CommittedEvent> events) {
  {
    std::unique_lock lock(mu_);
    for (CommittedEvent& e : events) log_.push_back(std::move(e));
  }
  published_.notify_all();
}

std::string EventBus::Subscribe(EventFilter filter,
                                std::optional<EventCoord> resume_after) {
  auto sub = std::make_shared<Subscription>();
  sub->filter = std::move(filter);
  std::unique_lock lock(mu_);
  if (resume_after) {
    auto it = std::upper_bound(
        log_.begin(), log_.end(), *resume_after,
        [](const EventCoord& c, const CommittedEvent& e) { return c < e.coord; });
    sub->next = static_cast<size_t>(it - log_.begin());
  }
  std::string id = absl::StrCat("sub-", next_id_++);
  subs_[id] = std::move(sub);
  return id;
}

absl::Status EventBus::Unsubscribe(const std::string& id) {
  std::unique_lock lock(mu_);
  if (subs_.erase(id) == 0) {
    return absl::NotFoundError(absl::StrCat("UnknownSubscription: ", id));
  }
  return absl::OkStatus();
}

std::shared_ptr<EventBus::Subscription> EventBus::Find(
    const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = subs_.find(id);
  return it == subs_.end() ? nullptr : it->second;
}

std::vector<CommittedEvent> EventBus::Collect(Subscription& sub,
                                              size_t max) const {
  std::vector<CommittedEvent> out;
  std::shared_lock lock(mu_);
  while (sub.next < log_.size() && out.size() < max) {
    const CommittedEvent& e = log_[sub.next++];
    if (sub.filter.Matches(e.event)) out.push_back(e);
  }
  return out;
}

absl::StatusOr<std::vector<CommittedEvent>> EventBus::Poll(
    const std::string& id, size_t max) {
  auto sub = Find(id);
  if (!sub) return absl::NotFoundError(absl::StrCat("UnknownSubscription: ", id));
  std::lock_guard<std::mutex> lock(sub->mu);
  return Collect(*sub, max);
}

absl::StatusOr<std::vector<CommittedEvent>> EventBus::WaitAndPoll(
    const std::string& id, size_t max, std::chrono::milliseconds timeout) {
  auto sub = Find(id);
  if (!sub) return absl::NotFoundError(absl::StrCat("UnknownSubscription: ", id));
  std::lock_guard<std::mutex> sub_lock(sub->mu);
  auto out = Collect(*sub, max);
  if (!out.empty()) return out;
  {
    std::shared_lock lock(mu_);
    published_.wait_for(lock, timeout,
                        [&] { return sub->next < log_.size(); });
  }
  return Collect(*sub, max);
}

std::vector<CommittedEvent> EventBus::AllEvents() const {
  std::shared_lock lock(mu_);
  return log_;
}

size_t EventBus::size() const {
  std::shared_lock lock(mu_);
  return log_.size();
}

}  // namespace doorledger
