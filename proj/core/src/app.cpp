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

#include "edgeiam/app.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "edgeiam/backends.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/net.hpp"

namespace edgeiam::app {

using nlohmann::json;

namespace {

std::optional<std::string> env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

bool parse_bool(const std::string& text, bool fallback) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  return fallback;
}

bool power_of_two(std::uint64_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

Result<DeploymentConfig> DeploymentConfig::from_json_text(
    std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Result<DeploymentConfig>(
        make_error(Errc::kConfigInvalid, "config must be a JSON object"));
  }
  DeploymentConfig cfg;
  cfg.store_backend = doc.value("store_backend", cfg.store_backend);
  cfg.store_root = doc.value("store_root", cfg.store_root);
  cfg.access_ttl_s = doc.value("access_ttl_s", cfg.access_ttl_s);
  cfg.perm_ttl_s = doc.value("perm_ttl_s", cfg.perm_ttl_s);
  cfg.async_grants = doc.value("async_grants", cfg.async_grants);
  cfg.replay_strict = doc.value("replay_strict", cfg.replay_strict);
  cfg.chain_depth = doc.value("chain_depth", cfg.chain_depth);
  if (doc.contains("listen") && doc["listen"].is_string()) {
    const std::string listen = doc["listen"].get<std::string>();
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
      return Result<DeploymentConfig>(make_error(
          Errc::kConfigInvalid, "listen must be host:port, got " + listen));
    }
    cfg.listen_host = listen.substr(0, colon);
    try {
      cfg.listen_port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
      return Result<DeploymentConfig>(
          make_error(Errc::kConfigInvalid, "bad listen port in " + listen));
    }
  }
  cfg.route_table = doc.value("route_table", cfg.route_table);
  cfg.topology = doc.value("topology", cfg.topology);
  cfg.scrypt_n = doc.value("scrypt_n", cfg.scrypt_n);
  cfg.scrypt_r = doc.value("scrypt_r", cfg.scrypt_r);
  cfg.scrypt_p = doc.value("scrypt_p", cfg.scrypt_p);
  cfg.apply_env_overrides();
  if (auto v = cfg.validate(); !v) {
    return Result<DeploymentConfig>(v.error());
  }
  return cfg;
}

Result<DeploymentConfig> DeploymentConfig::load(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return Result<DeploymentConfig>(make_error(
        Errc::kConfigInvalid, "cannot read config file " + path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void DeploymentConfig::apply_env_overrides() {
  if (auto v = env("EDGE_IAM_STORE_BACKEND")) store_backend = *v;
  if (auto v = env("EDGE_IAM_STORE_ROOT")) store_root = *v;
  if (auto v = env("EDGE_IAM_ACCESS_TTL_S")) access_ttl_s = std::atoll(v->c_str());
  if (auto v = env("EDGE_IAM_PERM_TTL_S")) perm_ttl_s = std::atoll(v->c_str());
  if (auto v = env("EDGE_IAM_ASYNC_GRANTS")) {
    async_grants = parse_bool(*v, async_grants);
  }
  if (auto v = env("EDGE_IAM_REPLAY_STRICT")) {
    replay_strict = parse_bool(*v, replay_strict);
  }
  if (auto v = env("EDGE_IAM_CHAIN_DEPTH")) chain_depth = std::atoi(v->c_str());
  if (auto v = env("EDGE_IAM_LISTEN")) {
    const auto colon = v->rfind(':');
    if (colon != std::string::npos) {
      listen_host = v->substr(0, colon);
      listen_port = std::atoi(v->c_str() + colon + 1);
    }
  }
  if (auto v = env("EDGE_IAM_ROUTE_TABLE")) route_table = *v;
  if (auto v = env("EDGE_IAM_TOPOLOGY")) topology = *v;
  if (auto v = env("EDGE_IAM_SCRYPT_N")) scrypt_n = std::atoll(v->c_str());
}

Result<void> DeploymentConfig::validate() const {
  if (store_backend != "memory" && store_backend != "file") {
    return make_error(Errc::kConfigInvalid,
                      "store_backend must be memory or file");
  }
  if (store_backend == "file" && store_root.empty()) {
    return make_error(Errc::kConfigInvalid,
                      "file backend requires store_root");
  }
  if (access_ttl_s <= 0 || perm_ttl_s <= 0) {
    return make_error(Errc::kConfigInvalid, "ttls must be positive");
  }
  if (chain_depth < 1) {
    return make_error(Errc::kConfigInvalid, "chain_depth must be >= 1");
  }
  if (topology != "inproc" && topology != "sockets") {
    return make_error(Errc::kConfigInvalid,
                      "topology must be inproc or sockets");
  }
  if (!power_of_two(scrypt_n) || scrypt_r == 0 || scrypt_p == 0) {
    return make_error(Errc::kConfigInvalid,
                      "scrypt_n must be a power of two >= 2, r/p positive");
  }
  if (listen_port < 0 || listen_port > 65535) {
    return make_error(Errc::kConfigInvalid, "listen port out of range");
  }
  return {};
}

struct System::Impl {
  DeploymentConfig config;
  std::shared_ptr<Clock> clock;
  AuditLog audit;

  std::shared_ptr<store::Store> data_store;
  std::shared_ptr<store::Store> vault_store;
  std::shared_ptr<vault::Vault> vault;
  std::shared_ptr<policy::PolicyEngine> policy;
  std::shared_ptr<identity::IdentityService> identity;
  std::shared_ptr<configsvc::ConfigService> config_service;

  std::vector<std::unique_ptr<net::BackendServer>> backend_servers;
  std::shared_ptr<Forwarder> forwarder;
  std::unique_ptr<gateway::Gateway> gateway;
  std::unique_ptr<net::GatewayServer> server;
};

System::~System() {
  if (impl_ != nullptr) stop();
}

void System::stop() {
  if (impl_ == nullptr) return;
  if (impl_->server) impl_->server->stop();
  for (auto& s : impl_->backend_servers) s->stop();
  if (impl_->identity) impl_->identity->wait_background();
}

Result<std::unique_ptr<System>> System::boot(const DeploymentConfig& config,
                                             std::shared_ptr<Clock> clock) {
  if (auto v = config.validate(); !v) {
    return Result<std::unique_ptr<System>>(v.error());
  }

  auto sys = std::unique_ptr<System>(new System());
  sys->impl_ = std::make_unique<Impl>();
  auto& impl = *sys->impl_;
  impl.config = config;
  impl.clock = clock ? std::move(clock) : system_clock();

  if (config.store_backend == "memory") {
    impl.data_store = store::make_memory_store();
    impl.vault_store = store::make_memory_store();
  } else {
    const std::filesystem::path root(config.store_root);
    auto data = store::make_file_store(root / "data");
    if (!data) return Result<std::unique_ptr<System>>(data.error());
    auto vault_backing = store::make_file_store(root / "vault");
    if (!vault_backing) {
      return Result<std::unique_ptr<System>>(vault_backing.error());
    }
    impl.data_store = std::move(data.value());
    impl.vault_store = std::move(vault_backing.value());
  }

  vault::VaultConfig vault_config;
  vault_config.access_ttl_s = config.access_ttl_s;
  vault_config.kdf =
      crypto::ScryptParams{config.scrypt_n, config.scrypt_r, config.scrypt_p};
  impl.vault =
      std::make_shared<vault::Vault>(impl.vault_store, impl.clock, vault_config);

  impl.policy = std::make_shared<policy::PolicyEngine>(impl.data_store,
                                                       &impl.audit);
  impl.identity = std::make_shared<identity::IdentityService>(
      impl.data_store, impl.vault, impl.policy, impl.clock,
      identity::IdentityConfig{config.async_grants}, &impl.audit);

  auto key = impl.vault->active_signing_key();
  if (!key) return Result<std::unique_ptr<System>>(key.error());

  configsvc::ConfigServiceOptions config_opts;
  config_opts.replay_strict = config.replay_strict;
  config_opts.replay_window_s = config.perm_ttl_s;
  impl.config_service = std::make_shared<configsvc::ConfigService>(
      impl.data_store, key.value(), impl.clock, config_opts);

  auto identity_backend = std::make_shared<backends::IdentityBackend>(
      impl.identity, key.value(), impl.clock);
  auto auth_backend = std::make_shared<backends::AuthBackend>(impl.vault);
  auto policy_backend = std::make_shared<backends::PolicyBackend>(
      impl.policy, impl.identity, key.value(), impl.clock);

  if (config.topology == "inproc") {
    auto forwarder = std::make_shared<InProcessForwarder>();
    forwarder->bind("identity", identity_backend);
    forwarder->bind("vault", auth_backend);
    forwarder->bind("policy", policy_backend);
    forwarder->bind("configsvc", impl.config_service);
    impl.forwarder = std::move(forwarder);
  } else {
    auto forwarder = std::make_shared<net::HttpForwarder>();
    const std::vector<std::pair<std::string, std::shared_ptr<Backend>>> wired =
        {{"identity", identity_backend},
         {"vault", auth_backend},
         {"policy", policy_backend},
         {"configsvc", impl.config_service}};
    for (const auto& [target, backend] : wired) {
      auto server = std::make_unique<net::BackendServer>(backend, "127.0.0.1");
      if (auto started = server->start(); !started) {
        return Result<std::unique_ptr<System>>(started.error());
      }
      forwarder->bind(target, server->host(), server->port());
      impl.backend_servers.push_back(std::move(server));
    }
    impl.forwarder = std::move(forwarder);
  }

  gateway::RouteTable routes = gateway::RouteTable::bundled();
  if (!config.route_table.empty()) {
    std::ifstream in(config.route_table, std::ios::binary);
    if (!in) {
      return Result<std::unique_ptr<System>>(make_error(
          Errc::kConfigParseError,
          "cannot read route table " + config.route_table));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto parsed = gateway::RouteTable::parse_json_text(buffer.str());
    if (!parsed) return Result<std::unique_ptr<System>>(parsed.error());
    routes = std::move(parsed.value());
  }

  gateway::GatewayConfig gw_config;
  gw_config.perm_ttl_s = config.perm_ttl_s;
  impl.gateway = std::make_unique<gateway::Gateway>(
      std::move(routes), impl.vault, impl.policy, impl.forwarder, key.value(),
      impl.clock, gw_config, &impl.audit);

  return Result<std::unique_ptr<System>>(std::move(sys));
}

Result<void> System::listen() {
  auto& impl = *impl_;
  impl.server = std::make_unique<net::GatewayServer>(
      *impl.gateway, impl.config.listen_host, impl.config.listen_port);
  return impl.server->start();
}

int System::port() const {
  return impl_->server ? impl_->server->port() : impl_->config.listen_port;
}

Result<void> System::seed_text(std::string_view fixtures_json) {
  json doc = json::parse(fixtures_json, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::kConfigInvalid, "fixtures must be a JSON object");
  }
  if (doc.contains("users")) {
    for (const auto& u : doc["users"]) {
      identity::RegistrationRequest req;
      req.username = u.value("username", "");
      req.password = u.value("password", "");
      if (u.contains("org_name") && u["org_name"].is_string()) {
        req.org_name = u["org_name"].get<std::string>();
      }
      if (u.contains("personal_info") && u["personal_info"].is_object()) {
        req.personal_info =
            u["personal_info"].get<std::map<std::string, std::string>>();
      }
      auto registered = impl_->identity->register_user(req);
      if (!registered) return registered.error();
    }
  }
  if (doc.contains("grants")) {
    for (const auto& g : doc["grants"]) {
      if (!g.contains("subject")) {
        return make_error(Errc::kConfigInvalid, "grant without subject");
      }
      const std::string kind_text = g.value("kind", "ALLOW");
      auto kind = policy::kind_from(kind_text);
      if (!kind) {
        return make_error(Errc::kConfigInvalid, "bad grant kind " + kind_text);
      }
      const json& s = g["subject"];
      policy::Subject subject =
          s.value("kind", "USER") == "ORG"
              ? policy::Subject::org(s.value("id", ""))
              : policy::Subject::user(s.value("id", ""));
      auto granted = impl_->policy->grant(subject, g.value("name", ""), *kind);
      if (!granted) return granted.error();
    }
  }
  impl_->identity->wait_background();
  return {};
}

Result<void> System::seed_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(Errc::kConfigInvalid,
                      "cannot read fixtures " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return seed_text(buffer.str());
}

gateway::Gateway& System::gateway() { return *impl_->gateway; }
vault::Vault& System::vault() { return *impl_->vault; }
policy::PolicyEngine& System::policy() { return *impl_->policy; }
identity::IdentityService& System::identity() { return *impl_->identity; }
configsvc::ConfigService& System::config_service() {
  return *impl_->config_service;
}
store::Store& System::data_store() { return *impl_->data_store; }
store::Store& System::vault_store() { return *impl_->vault_store; }
AuditLog& System::audit() { return impl_->audit; }
const DeploymentConfig& System::config() const { return impl_->config; }

}  // namespace edgeiam::app
