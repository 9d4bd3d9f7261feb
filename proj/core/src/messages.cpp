// Copyright 2026 the edge-iam authors
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

#include "edgeiam/messages.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace edgeiam {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

}  // namespace

std::string find_header(const HttpRequest& req, std::string_view name) {
  for (const auto& [key, value] : req.headers) {
    if (iequals(key, name)) return value;
  }
  return {};
}

std::uint64_t Forwarder::sent(const std::string& target) const {
  std::lock_guard lock(counter_mu_);
  auto it = counters_.find(target);
  return it == counters_.end() ? 0 : it->second;
}

std::uint64_t Forwarder::sent_total() const {
  std::lock_guard lock(counter_mu_);
  std::uint64_t total = 0;
  for (const auto& [_, n] : counters_) total += n;
  return total;
}

void Forwarder::reset_counters() {
  std::lock_guard lock(counter_mu_);
  counters_.clear();
}

void Forwarder::count(const std::string& target) {
  std::lock_guard lock(counter_mu_);
  ++counters_[target];
}

void InProcessForwarder::bind(std::string target,
                              std::shared_ptr<Backend> backend) {
  backends_[std::move(target)] = std::move(backend);
}

Result<BackendResponse> InProcessForwarder::send(const std::string& target,
                                                 const ForwardedRequest& req) {
  auto it = backends_.find(target);
  if (it == backends_.end()) {
    return Result<BackendResponse>(make_error(
        Errc::kBackendUnavailable, "no backend bound for target " + target));
  }
  count(target);
  return it->second->handle(req);
}

std::string error_body(std::string_view message, std::string_view code,
                       std::string_view request_id) {
  nlohmann::json j{{"error", std::string(message)},
                   {"code", std::string(code)},
                   {"request_id", std::string(request_id)}};
  return j.dump();
}

}  // namespace edgeiam
