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
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/audit.hpp"
#include "edgeiam/clock.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/vault.hpp"

namespace edgeiam::gateway {

// "NONE" marks the unauthenticated auth endpoints; anything else must be a
// catalog permission name.
inline constexpr std::string_view kNoPermission = "NONE";

struct Route {
  std::string method;
  std::string pattern;  // path with {var} segments
  std::string target;
  std::string permission;
};

class RouteTable {
 public:
  RouteTable() = default;

  // Validates methods, permission names against the catalog, and pairwise
  // unambiguity (no request may match two routes).
  static Result<RouteTable> parse_json_text(std::string_view json_text);
  static Result<RouteTable> from_routes(std::vector<Route> routes);

  // The nine built-in API routes.
  static RouteTable bundled();

  const Route* match(std::string_view method, std::string_view path) const;
  std::size_t size() const { return routes_.size(); }
  const std::vector<Route>& routes() const { return routes_; }

 private:
  std::vector<Route> routes_;
  std::vector<std::vector<std::string>> segments_;  // split patterns
};

enum class Mode {
  kIam,          // full verify/resolve/mint pipeline
  kPassthrough,  // route match only; no authorization at the edge
};

struct GatewayConfig {
  std::int64_t perm_ttl_s = token::kDefaultPermTtlS;
  Mode mode = Mode::kIam;
};

// The edge proxy. Pipeline per request: route match, access-token
// verification against the vault, fresh permission resolution, decision,
// permission-JWT mint, forward. Refusals never touch a backend, and a 401
// never reaches the policy engine.
class Gateway {
 public:
  Gateway(RouteTable routes, std::shared_ptr<vault::Vault> vault,
          std::shared_ptr<policy::PolicyEngine> policy,
          std::shared_ptr<Forwarder> forwarder, token::SigningKey key,
          std::shared_ptr<Clock> clock, GatewayConfig config = {},
          AuditLog* audit = nullptr);

  HttpResponse handle_request(const HttpRequest& req);

  // Atomic replacement; the old table stays live on a parse error and for
  // requests already in flight.
  Result<std::size_t> load_routes_file(const std::filesystem::path& path);
  Result<std::size_t> load_routes_text(std::string_view json_text);

  std::size_t route_count() const;

 private:
  std::shared_ptr<const RouteTable> table() const;

  std::shared_ptr<const RouteTable> routes_;
  mutable std::mutex routes_mu_;
  std::shared_ptr<vault::Vault> vault_;
  std::shared_ptr<policy::PolicyEngine> policy_;
  std::shared_ptr<Forwarder> forwarder_;
  token::SigningKey key_;
  std::shared_ptr<Clock> clock_;
  GatewayConfig config_;
  AuditLog* audit_;
};

}  // namespace edgeiam::gateway
