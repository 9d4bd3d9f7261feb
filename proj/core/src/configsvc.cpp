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

#include "edgeiam/configsvc.hpp"

#include <json.hpp>

#include "edgeiam/backends.hpp"
#include "edgeiam/crypto.hpp"

namespace edgeiam::configsvc {

using nlohmann::json;

namespace {

bool valid_segment(std::string_view s) {
  if (s.empty() || s.size() > 128) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

store::StoreKey entry_key(std::string_view ns, std::string_view name) {
  return {"configs", std::string(ns) + ":" + std::string(name)};
}

}  // namespace

ConfigService::ConfigService(std::shared_ptr<store::Store> store,
                             token::SigningKey key,
                             std::shared_ptr<Clock> clock,
                             ConfigServiceOptions opts)
    : store_(std::move(store)),
      key_(std::move(key)),
      clock_(std::move(clock)),
      opts_(opts) {}

bool ConfigService::replayed(const std::string& jti, std::int64_t now) {
  std::lock_guard lock(replay_mu_);
  for (auto it = seen_.begin(); it != seen_.end();) {
    it = it->second <= now ? seen_.erase(it) : std::next(it);
  }
  const auto [it, inserted] =
      seen_.try_emplace(jti, now + opts_.replay_window_s);
  return !inserted;
}

BackendResponse ConfigService::handle(const ForwardedRequest& req) {
  const auto parts = backends::split_path(req.path);
  if (parts.size() != 5 || parts[2] != "configs" ||
      (req.method != "PUT" && req.method != "GET")) {
    return backends::error_response(
        404, "unknown_route", "config service has no handler for " + req.path,
        req.request_id);
  }
  const std::string& ns = parts[3];
  const std::string& name = parts[4];
  const std::string required =
      req.method == "PUT" ? "config.put" : "config.get";

  // The permission token is the only authorization input here.
  if (req.permission_token.empty()) {
    return backends::error_response(401, "missing_permission_token",
                                    "permission token required",
                                    req.request_id);
  }
  auto claims = token::verify(req.permission_token, key_, clock_->now_s());
  if (!claims) {
    return backends::error_response(401, errc_name(claims.error().code),
                                    claims.error().message, req.request_id);
  }
  if (opts_.replay_strict && replayed(claims.value().jti, clock_->now_s())) {
    return backends::error_response(401, "replayed_token",
                                    "permission token already used",
                                    req.request_id);
  }

  bool allowed = false;
  for (const auto& encoded : claims.value().permissions) {
    auto p = token::decode_permission(encoded);
    if (p && p.value().name == required &&
        p.value().kind == policy::Kind::kAllow) {
      allowed = true;
      break;
    }
  }
  if (!allowed) {
    return backends::error_response(
        403, "permission_denied", "token does not allow " + required,
        req.request_id);
  }

  if (req.method == "PUT") {
    return put_entry(req, ns, name, claims.value().sub);
  }
  return read_entry(req, ns, name);
}

BackendResponse ConfigService::handle_trusted(const ForwardedRequest& req,
                                              std::string_view username) {
  const auto parts = backends::split_path(req.path);
  if (parts.size() != 5 || parts[2] != "configs" ||
      (req.method != "PUT" && req.method != "GET")) {
    return backends::error_response(
        404, "unknown_route", "config service has no handler for " + req.path,
        req.request_id);
  }
  if (req.method == "PUT") {
    return put_entry(req, parts[3], parts[4], username);
  }
  return read_entry(req, parts[3], parts[4]);
}

BackendResponse ConfigService::put_entry(const ForwardedRequest& req,
                                         std::string_view ns,
                                         std::string_view name,
                                         std::string_view user) {
  if (!valid_segment(ns) || !valid_segment(name)) {
    return backends::error_response(400, "bad_request",
                                    "namespace and name must be [A-Za-z0-9._-]+",
                                    req.request_id);
  }
  json value{{"namespace", std::string(ns)},
             {"name", std::string(name)},
             {"payload", crypto::base64url_encode(req.body)},
             {"content_type", req.content_type},
             {"created_by", std::string(user)},
             {"created_at", clock_->now_s()}};
  auto put = store_->put(entry_key(ns, name), value.dump());
  if (!put) {
    return backends::error_response(500, "store_io", put.error().message,
                                    req.request_id);
  }
  json out{{"namespace", std::string(ns)},
           {"name", std::string(name)},
           {"version", put.value()},
           {"created_by", std::string(user)}};
  return BackendResponse{201, out.dump(), "application/json"};
}

BackendResponse ConfigService::read_entry(const ForwardedRequest& req,
                                          std::string_view ns,
                                          std::string_view name) {
  auto entry = get_entry(ns, name);
  if (!entry) {
    return backends::error_response(500, "store_io", entry.error().message,
                                    req.request_id);
  }
  if (!entry.value().has_value()) {
    return backends::error_response(
        404, "not_found",
        "no config " + std::string(ns) + "/" + std::string(name),
        req.request_id);
  }
  BackendResponse resp;
  resp.status = 200;
  resp.body = entry.value()->payload;
  resp.content_type = "application/octet-stream";
  return resp;
}

Result<std::optional<ConfigEntry>> ConfigService::get_entry(
    std::string_view ns, std::string_view name) {
  auto rec = store_->get(entry_key(ns, name));
  if (!rec) return Result<std::optional<ConfigEntry>>(rec.error());
  if (!rec.value().has_value()) return std::optional<ConfigEntry>{};
  json j = json::parse(rec.value()->value, nullptr, false);
  if (j.is_discarded()) {
    return Result<std::optional<ConfigEntry>>(
        make_error(Errc::kStoreIo, "corrupt config record"));
  }
  ConfigEntry entry;
  entry.ns = j.value("namespace", "");
  entry.name = j.value("name", "");
  const auto payload = crypto::base64url_decode(j.value("payload", ""));
  entry.payload = payload.value_or("");
  entry.version = rec.value()->version;
  entry.created_by = j.value("created_by", "");
  entry.created_at = j.value("created_at", std::int64_t{0});
  return std::optional<ConfigEntry>(std::move(entry));
}

}  // namespace edgeiam::configsvc
