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

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <stdexcept>

#include "edgeiam/audit.hpp"
#include "edgeiam/backends.hpp"
#include "edgeiam/clock.hpp"
#include "edgeiam/configsvc.hpp"
#include "edgeiam/gateway.hpp"
#include "edgeiam/identity.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/store.hpp"
#include "edgeiam/vault.hpp"

namespace testsupport {

namespace ei = edgeiam;

inline void expect(bool condition, const std::string& what) {
  if (!condition) throw std::runtime_error("test support: " + what);
}

// Deterministic, order-independent dump of everything a store holds.
// Two byte-identical states produce equal snapshots on any backend.
inline std::string snapshot_store(ei::store::Store& store) {
  std::ostringstream out;
  for (auto ns : ei::store::kNamespaces) {
    auto records = store.list_prefix(ns, "");
    expect(records.ok(), "list_prefix failed while snapshotting");
    for (const auto& rec : records.value()) {
      out << rec.key.ns << '/' << rec.key.id << '@' << rec.version << '='
          << rec.value << '\n';
    }
  }
  return out.str();
}

// Byte-level digest of a file store directory tree.
inline std::string snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  if (std::filesystem::exists(root)) {
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
      files[std::filesystem::relative(entry.path(), root).string()] =
          std::move(content);
    }
  }
  std::ostringstream out;
  for (const auto& [path, content] : files) {
    out << path << '|' << content.size() << '|' << content << '\n';
  }
  return out.str();
}

inline ei::crypto::ScryptParams light_kdf() { return {1024, 8, 1}; }

// A fully wired single-process stack with a manual clock, a light KDF and
// a counting in-process hop, plus direct handles to every component.
struct TestStack {
  std::shared_ptr<ei::ManualClock> clock;
  ei::AuditLog audit;
  std::shared_ptr<ei::store::Store> data_store;
  std::shared_ptr<ei::store::Store> vault_store;
  std::shared_ptr<ei::vault::Vault> vault;
  std::shared_ptr<ei::policy::PolicyEngine> policy;
  std::shared_ptr<ei::identity::IdentityService> identity;
  std::shared_ptr<ei::configsvc::ConfigService> config_service;
  std::shared_ptr<ei::InProcessForwarder> forwarder;
  ei::token::SigningKey key;
  std::unique_ptr<ei::gateway::Gateway> gateway;

  explicit TestStack(bool async_grants = false,
                     std::int64_t access_ttl_s = 3600,
                     std::int64_t perm_ttl_s = 5) {
    clock = std::make_shared<ei::ManualClock>();
    data_store = ei::store::make_memory_store();
    vault_store = ei::store::make_memory_store();
    ei::vault::VaultConfig vault_config;
    vault_config.access_ttl_s = access_ttl_s;
    vault_config.kdf = light_kdf();
    vault = std::make_shared<ei::vault::Vault>(vault_store, clock,
                                               vault_config);
    policy = std::make_shared<ei::policy::PolicyEngine>(data_store, &audit);
    identity = std::make_shared<ei::identity::IdentityService>(
        data_store, vault, policy, clock,
        ei::identity::IdentityConfig{async_grants}, &audit);
    key = vault->active_signing_key().value();
    config_service = std::make_shared<ei::configsvc::ConfigService>(
        data_store, key, clock);

    forwarder = std::make_shared<ei::InProcessForwarder>();
    forwarder->bind("identity", std::make_shared<ei::backends::IdentityBackend>(
                                    identity, key, clock));
    forwarder->bind("vault", std::make_shared<ei::backends::AuthBackend>(vault));
    forwarder->bind("policy", std::make_shared<ei::backends::PolicyBackend>(
                                  policy, identity, key, clock));
    forwarder->bind("configsvc", config_service);

    ei::gateway::GatewayConfig gw_config;
    gw_config.perm_ttl_s = perm_ttl_s;
    gateway = std::make_unique<ei::gateway::Gateway>(
        ei::gateway::RouteTable::bundled(), vault, policy, forwarder, key,
        clock, gw_config, &audit);
  }

  // Convenience client against the in-process gateway.
  ei::HttpResponse call(std::string method, std::string path, std::string body,
                        const std::string& bearer = "",
                        const std::string& username_header = "") {
    ei::HttpRequest req;
    req.method = std::move(method);
    req.path = std::move(path);
    req.body = std::move(body);
    req.content_type = "application/json";
    if (!bearer.empty()) req.set_header("Authorization", "Bearer " + bearer);
    if (!username_header.empty()) {
      req.set_header(std::string(ei::kUsernameHeader), username_header);
    }
    return gateway->handle_request(req);
  }

  std::string register_and_login(const std::string& username,
                                 const std::string& password,
                                 const std::string& org = "") {
    nlohmann::json body{{"username", username}, {"password", password}};
    if (!org.empty()) body["org_name"] = org;
    auto reg = call("POST", "/api/v1/auth/register", body.dump());
    expect(reg.status == 201, "registration failed: " + reg.body);
    nlohmann::json login{{"username", username}, {"password", password}};
    auto resp = call("POST", "/api/v1/auth/login", login.dump());
    expect(resp.status == 200, "login failed: " + resp.body);
    return nlohmann::json::parse(resp.body)["access_token"].get<std::string>();
  }
};

// ---------------------------------------------------------------------------
// Brute-force permission resolution, kept deliberately literal: enumerate
// every (subject, grant) pair, shadow inherited names by direct ones, let
// DENY win inside a level. Used as the oracle the engine must agree with.

struct OracleGrant {
  std::string subject;  // "u:<name>" or "o:<name>"
  std::string name;
  ei::policy::Kind kind;
  std::string id;
};

struct OracleWorld {
  std::map<std::string, std::string> user_org;  // user -> inherited org ("" = none)
  std::vector<OracleGrant> grants;
};

inline std::vector<ei::policy::Permission> oracle_effective(
    const OracleWorld& world, const std::string& user) {
  auto level = [&](const std::string& subject)
      -> std::map<std::string, std::pair<const OracleGrant*, const OracleGrant*>> {
    // name -> (allow, deny)
    std::map<std::string, std::pair<const OracleGrant*, const OracleGrant*>> out;
    for (const auto& g : world.grants) {
      if (g.subject != subject) continue;
      auto& slot = out[g.name];
      if (g.kind == ei::policy::Kind::kDeny) {
        slot.second = &g;
      } else {
        slot.first = &g;
      }
    }
    return out;
  };

  auto direct = level("u:" + user);
  decltype(direct) inherited;
  auto it = world.user_org.find(user);
  if (it != world.user_org.end() && !it->second.empty()) {
    inherited = level("o:" + it->second);
  }

  std::map<std::string, const OracleGrant*> winners;
  for (const auto& [name, slot] : inherited) {
    winners[name] = slot.second != nullptr ? slot.second : slot.first;
  }
  for (const auto& [name, slot] : direct) {
    winners[name] = slot.second != nullptr ? slot.second : slot.first;
  }

  std::vector<ei::policy::Permission> out;
  for (const auto& [name, g] : winners) {
    out.push_back(ei::policy::Permission{g->id, g->name, g->kind});
  }
  return out;  // std::map iteration is already name-sorted
}

// Writes bare user/org records straight into the shared store so the
// policy engine sees existing subjects without the full identity flow.
inline void fabricate_user(ei::store::Store& store, const std::string& user,
                           const std::string& org) {
  nlohmann::json j{{"username", user},
                   {"personal_info", nlohmann::json::object()},
                   {"org", org},
                   {"role", "MEMBER"},
                   {"created_at", 0}};
  expect(store.put({"users", user}, j.dump()).ok(), "fabricate_user put");
}

inline void fabricate_org(ei::store::Store& store, const std::string& org) {
  nlohmann::json j{{"name", org}, {"owner", org}, {"created_at", 0}};
  expect(store.put({"orgs", org}, j.dump()).ok(), "fabricate_org put");
}

}  // namespace testsupport
