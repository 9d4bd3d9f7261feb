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
#include <string>
#include <string_view>

#include "edgeiam/audit.hpp"
#include "edgeiam/clock.hpp"
#include "edgeiam/configsvc.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/gateway.hpp"
#include "edgeiam/identity.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/store.hpp"
#include "edgeiam/vault.hpp"

namespace edgeiam::app {

// Declarative wiring for the whole stack. JSON file, every field optional,
// overridable through EDGE_IAM_* environment variables.
struct DeploymentConfig {
  std::string store_backend = "memory";  // memory | file
  std::string store_root;                // required for the file backend
  std::int64_t access_ttl_s = 3600;
  std::int64_t perm_ttl_s = 5;
  bool async_grants = false;
  bool replay_strict = false;
  int chain_depth = 3;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string route_table;            // optional path; bundled table if empty
  std::string topology = "inproc";    // inproc | sockets
  std::uint64_t scrypt_n = 16384;
  std::uint32_t scrypt_r = 8;
  std::uint32_t scrypt_p = 1;

  static Result<DeploymentConfig> from_json_text(std::string_view text);
  static Result<DeploymentConfig> load(const std::filesystem::path& path);

  void apply_env_overrides();
  Result<void> validate() const;
};

// A running system: stores, vault, policy, identity, config service and
// gateway wired per the config. The external listener is started
// separately so in-process tests can drive the gateway directly.
class System {
 public:
  static Result<std::unique_ptr<System>> boot(
      const DeploymentConfig& config,
      std::shared_ptr<Clock> clock = nullptr);
  ~System();

  // Starts the external HTTP listener; resolves the actual port when the
  // configured one is 0.
  Result<void> listen();
  void stop();
  int port() const;

  // Registers users and applies grants from a fixtures document:
  // {"users":[{username,password,org_name?,personal_info?}],
  //  "grants":[{"subject":{"kind","id"},"name","kind"}]}
  Result<void> seed_text(std::string_view fixtures_json);
  Result<void> seed_file(const std::filesystem::path& path);

  gateway::Gateway& gateway();
  vault::Vault& vault();
  policy::PolicyEngine& policy();
  identity::IdentityService& identity();
  configsvc::ConfigService& config_service();
  store::Store& data_store();
  store::Store& vault_store();
  AuditLog& audit();
  const DeploymentConfig& config() const;

 private:
  System() = default;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace edgeiam::app
