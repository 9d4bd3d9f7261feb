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

#include "edgeiam/gateway.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edgeiam/crypto.hpp"

namespace edgeiam::gateway {

using nlohmann::json;

namespace {

const std::vector<std::string> kMethods = {"GET", "POST", "PUT", "DELETE",
                                           "PATCH"};

std::vector<std::string> split_segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) out.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

bool is_variable(const std::string& segment) {
  return segment.size() >= 2 && segment.front() == '{' &&
         segment.back() == '}';
}

// Two patterns are ambiguous when some request could match both: equal
// length and every position either equal literals or at least one variable.
bool patterns_overlap(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_variable(a[i]) || is_variable(b[i])) continue;
    if (a[i] != b[i]) return false;
  }
  return true;
}

HttpResponse refuse(int status, std::string_view code, std::string_view message,
                    std::string_view request_id) {
  return HttpResponse{status, error_body(message, code, request_id),
                      "application/json"};
}

}  // namespace

Result<RouteTable> RouteTable::from_routes(std::vector<Route> routes) {
  RouteTable table;
  for (auto& route : routes) {
    if (std::find(kMethods.begin(), kMethods.end(), route.method) ==
        kMethods.end()) {
      return Result<RouteTable>(make_error(
          Errc::kConfigParseError, "unknown method " + route.method));
    }
    if (route.permission != kNoPermission) {
      const auto& catalog = policy::system_permissions();
      if (std::find(catalog.begin(), catalog.end(), route.permission) ==
          catalog.end()) {
        return Result<RouteTable>(make_error(
            Errc::kConfigParseError,
            "route permission not in catalog: " + route.permission));
      }
    }
    if (route.target.empty()) {
      return Result<RouteTable>(
          make_error(Errc::kConfigParseError, "route without target"));
    }
    auto segments = split_segments(route.pattern);
    if (segments.empty()) {
      return Result<RouteTable>(
          make_error(Errc::kConfigParseError, "empty route pattern"));
    }
    for (std::size_t i = 0; i < table.routes_.size(); ++i) {
      if (table.routes_[i].method == route.method &&
          patterns_overlap(table.segments_[i], segments)) {
        return Result<RouteTable>(make_error(
            Errc::kConfigParseError,
            "ambiguous routes: " + table.routes_[i].pattern + " vs " +
                route.pattern));
      }
    }
    table.routes_.push_back(std::move(route));
    table.segments_.push_back(std::move(segments));
  }
  return table;
}

Result<RouteTable> RouteTable::parse_json_text(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    return Result<RouteTable>(make_error(
        Errc::kConfigParseError, "route table must be a JSON array"));
  }
  std::vector<Route> routes;
  for (const auto& item : doc) {
    if (!item.is_object()) {
      return Result<RouteTable>(
          make_error(Errc::kConfigParseError, "route entry must be an object"));
    }
    Route route;
    route.method = item.value("method", "");
    route.pattern = item.value("path", "");
    route.target = item.value("target", "");
    route.permission = item.value("permission", std::string(kNoPermission));
    routes.push_back(std::move(route));
  }
  return from_routes(std::move(routes));
}

RouteTable RouteTable::bundled() {
  auto table = from_routes({
      {"POST", "/api/v1/auth/register", "identity", std::string(kNoPermission)},
      {"POST", "/api/v1/auth/login", "vault", std::string(kNoPermission)},
      {"PUT", "/api/v1/auth/credentials", "vault", std::string(kNoPermission)},
      {"POST", "/api/v1/orgs/{org}/members", "identity", "org.member.add"},
      {"DELETE", "/api/v1/orgs/{org}/members/{username}", "identity",
       "org.member.remove"},
      {"POST", "/api/v1/orgs/{org}/permissions", "policy", "org.perm.grant"},
      {"DELETE", "/api/v1/orgs/{org}/permissions", "policy",
       "org.perm.revoke"},
      {"PUT", "/api/v1/configs/{namespace}/{name}", "configsvc", "config.put"},
      {"GET", "/api/v1/configs/{namespace}/{name}", "configsvc", "config.get"},
  });
  return std::move(table.value());
}

const Route* RouteTable::match(std::string_view method,
                               std::string_view path) const {
  const auto request_segments = split_segments(path);
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    if (routes_[i].method != method) continue;
    const auto& pattern = segments_[i];
    if (pattern.size() != request_segments.size()) continue;
    bool matched = true;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      if (is_variable(pattern[k])) continue;
      if (pattern[k] != request_segments[k]) {
        matched = false;
        break;
      }
    }
    if (matched) return &routes_[i];
  }
  return nullptr;
}

Gateway::Gateway(RouteTable routes, std::shared_ptr<vault::Vault> vault,
                 std::shared_ptr<policy::PolicyEngine> policy,
                 std::shared_ptr<Forwarder> forwarder, token::SigningKey key,
                 std::shared_ptr<Clock> clock, GatewayConfig config,
                 AuditLog* audit)
    : routes_(std::make_shared<const RouteTable>(std::move(routes))),
      vault_(std::move(vault)),
      policy_(std::move(policy)),
      forwarder_(std::move(forwarder)),
      key_(std::move(key)),
      clock_(std::move(clock)),
      config_(config),
      audit_(audit) {}

std::shared_ptr<const RouteTable> Gateway::table() const {
  std::lock_guard lock(routes_mu_);
  return routes_;
}

std::size_t Gateway::route_count() const { return table()->size(); }

Result<std::size_t> Gateway::load_routes_text(std::string_view json_text) {
  auto parsed = RouteTable::parse_json_text(json_text);
  if (!parsed) return Result<std::size_t>(parsed.error());
  auto fresh = std::make_shared<const RouteTable>(std::move(parsed.value()));
  std::lock_guard lock(routes_mu_);
  routes_ = std::move(fresh);
  return routes_->size();
}

Result<std::size_t> Gateway::load_routes_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return Result<std::size_t>(make_error(
        Errc::kConfigParseError, "cannot read route table " + path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_routes_text(buffer.str());
}

HttpResponse Gateway::handle_request(const HttpRequest& req) {
  const std::string request_id = crypto::uuid4();
  const auto routes = table();

  // Strip any query string before matching.
  std::string_view path = req.path;
  if (auto q = path.find('?'); q != std::string_view::npos) {
    path = path.substr(0, q);
  }

  const Route* route = routes->match(req.method, path);
  if (route == nullptr) {
    return refuse(404, "unknown_route",
                  "no route for " + req.method + " " + std::string(path),
                  request_id);
  }

  ForwardedRequest fwd;
  fwd.method = req.method;
  fwd.path = std::string(path);
  fwd.body = req.body;
  fwd.content_type = req.content_type;
  fwd.request_id = request_id;

  auto relay = [&](Result<BackendResponse> sent) -> HttpResponse {
    if (!sent) {
      if (audit_ != nullptr) {
        audit_->append("gateway.backend_unavailable", sent.error().message);
      }
      return refuse(502, "backend_unavailable", sent.error().message,
                    request_id);
    }
    return HttpResponse{sent.value().status, sent.value().body,
                        sent.value().content_type};
  };

  if (config_.mode == Mode::kPassthrough) {
    // Router only: authorization is the destination's problem.
    fwd.username_header = find_header(req, kUsernameHeader);
    fwd.authorization = find_header(req, "Authorization");
    return relay(forwarder_->send(route->target, fwd));
  }

  if (route->permission == kNoPermission) {
    // Auth endpoints go to the trusted party as-is; it owns the Bearer.
    fwd.authorization = find_header(req, "Authorization");
    return relay(forwarder_->send(route->target, fwd));
  }

  const std::string auth_header = find_header(req, "Authorization");
  if (auth_header.size() < 8 || auth_header.compare(0, 7, "Bearer ") != 0) {
    return refuse(401, "missing_token", "Authorization: Bearer required",
                  request_id);
  }
  const std::string token_value = auth_header.substr(7);

  auto info = vault_->verify_token(token_value);
  if (!info) {
    if (info.error().code == Errc::kTokenExpired) {
      return refuse(401, "expired_token", "access token expired", request_id);
    }
    if (info.error().code == Errc::kTokenInvalid) {
      return refuse(401, "invalid_token", "access token not recognized",
                    request_id);
    }
    return refuse(500, "internal_error", info.error().message, request_id);
  }

  // Fresh permissions on every request; the one policy call of the flow.
  auto effective = policy_->effective_permissions(info.value().subject);
  if (!effective) {
    if (effective.error().code == Errc::kUnknownSubject) {
      // Token outlived the account. Deny at the edge.
      if (audit_ != nullptr) {
        audit_->append("gateway.deny", "subject gone: " + info.value().subject);
      }
      return refuse(403, "permission_denied", "permission denied", request_id);
    }
    return refuse(500, "internal_error", effective.error().message, request_id);
  }

  if (!policy::allows(effective.value(), route->permission)) {
    if (audit_ != nullptr) {
      audit_->append("gateway.deny", info.value().subject + " lacks " +
                                         route->permission + " for " +
                                         fwd.path);
    }
    return refuse(403, "permission_denied",
                  "missing permission " + route->permission, request_id);
  }

  const auto claims = token::make_claims(info.value().subject,
                                         effective.value(), clock_->now_s(),
                                         config_.perm_ttl_s);
  fwd.permission_token = token::mint(claims, key_);
  // The external Authorization header stops here (fwd.authorization stays
  // empty); backends trust the permission token alone.
  return relay(forwarder_->send(route->target, fwd));
}

}  // namespace edgeiam::gateway
