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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "edgeiam/clock.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/store.hpp"

namespace edgeiam::configsvc {

struct ConfigEntry {
  std::string ns;
  std::string name;
  std::string payload;
  std::uint64_t version = 0;
  std::string created_by;
  std::int64_t created_at = 0;
};

struct ConfigServiceOptions {
  // Strict one-time semantics: remember seen jti values for the token
  // lifetime and refuse replays. Off by default.
  bool replay_strict = false;
  std::int64_t replay_window_s = token::kDefaultPermTtlS;
};

// Demo backend for namespaced configuration. Zero-trust ingress: its only
// authorization input is the permission JWT; it holds no reference to
// identity, vault, or policy. PUT requires config.put ALLOW in the token,
// GET requires config.get ALLOW.
class ConfigService final : public Backend {
 public:
  ConfigService(std::shared_ptr<store::Store> store, token::SigningKey key,
                std::shared_ptr<Clock> clock, ConfigServiceOptions opts = {});

  // Routes PUT/GET /api/v1/configs/{namespace}/{name}.
  BackendResponse handle(const ForwardedRequest& req) override;

  // Post-authorization path for callers that established the subject some
  // other way (the plain-header benchmark flow).
  BackendResponse handle_trusted(const ForwardedRequest& req,
                                 std::string_view username);

  Result<std::optional<ConfigEntry>> get_entry(std::string_view ns,
                                               std::string_view name);

 private:
  BackendResponse put_entry(const ForwardedRequest& req, std::string_view ns,
                            std::string_view name, std::string_view user);
  BackendResponse read_entry(const ForwardedRequest& req, std::string_view ns,
                             std::string_view name);
  bool replayed(const std::string& jti, std::int64_t now);

  std::shared_ptr<store::Store> store_;
  token::SigningKey key_;
  std::shared_ptr<Clock> clock_;
  ConfigServiceOptions opts_;
  std::mutex replay_mu_;
  std::map<std::string, std::int64_t> seen_;  // jti -> retention deadline
};

}  // namespace edgeiam::configsvc
