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

#include "edgeiam/bench.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "edgeiam/backends.hpp"
#include "edgeiam/configsvc.hpp"
#include "edgeiam/gateway.hpp"
#include "edgeiam/identity.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/net.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/vault.hpp"

namespace edgeiam::bench {

using nlohmann::json;

std::string_view flow_mode_name(FlowMode mode) {
  return mode == FlowMode::kWithIam ? "with-iam" : "without-iam";
}

Result<void> FlowSpec::validate() const {
  if (n_requests <= 0) {
    return make_error(Errc::kConfigInvalid, "n_requests must be positive");
  }
  if (chain_depth < 1) {
    return make_error(Errc::kConfigInvalid, "chain_depth must be >= 1");
  }
  if (concurrency < 1) {
    return make_error(Errc::kConfigInvalid, "concurrency must be >= 1");
  }
  if (authorized_fraction < 0.0 || authorized_fraction > 1.0) {
    return make_error(Errc::kConfigInvalid,
                      "authorized_fraction must be within [0,1]");
  }
  if (warmup_requests < 0) {
    return make_error(Errc::kConfigInvalid, "warmup must be >= 0");
  }
  return {};
}

namespace {

constexpr const char* kOwner = "bench.owner";
constexpr const char* kLimited = "bench.limited";
constexpr const char* kPassword = "benchpass-123";

// Counts arrivals in front of any backend.
class CountingBackend final : public Backend {
 public:
  explicit CountingBackend(std::shared_ptr<Backend> inner)
      : inner_(std::move(inner)) {}

  BackendResponse handle(const ForwardedRequest& req) override {
    received_.fetch_add(1, std::memory_order_relaxed);
    return inner_->handle(req);
  }

  std::uint64_t received() const { return received_.load(); }
  void reset() { received_.store(0); }

 private:
  std::shared_ptr<Backend> inner_;
  std::atomic<std::uint64_t> received_{0};
};

// Intermediate service: authorizes its hop, then forwards unchanged.
// With the permission token it checks the token alone; in the plain-header
// flow it asks the policy engine, one more wire call per hop.
class ChainService final : public Backend {
 public:
  ChainService(token::SigningKey key, std::shared_ptr<Clock> clock,
               std::shared_ptr<Forwarder> next, std::string next_target)
      : key_(std::move(key)),
        clock_(std::move(clock)),
        next_(std::move(next)),
        next_target_(std::move(next_target)) {}

  ChainService(std::shared_ptr<net::PolicyPort> policy,
               std::shared_ptr<Forwarder> next, std::string next_target)
      : policy_(std::move(policy)),
        next_(std::move(next)),
        next_target_(std::move(next_target)) {}

  BackendResponse handle(const ForwardedRequest& req) override {
    const std::string required =
        req.method == "GET" ? "config.get" : "config.put";
    if (policy_ != nullptr) {
      if (req.username_header.empty() ||
          policy_->check(req.username_header, required) !=
              policy::Decision::kAllow) {
        return backends::error_response(403, "permission_denied",
                                        "policy refused " + required,
                                        req.request_id);
      }
    } else {
      if (req.permission_token.empty()) {
        return backends::error_response(401, "missing_permission_token",
                                        "permission token required",
                                        req.request_id);
      }
      auto claims = token::verify(req.permission_token, key_, clock_->now_s());
      if (!claims) {
        return backends::error_response(401, errc_name(claims.error().code),
                                        claims.error().message,
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
        return backends::error_response(403, "permission_denied",
                                        "token does not allow " + required,
                                        req.request_id);
      }
    }
    auto sent = next_->send(next_target_, req);
    if (!sent) {
      return backends::error_response(502, "backend_unavailable",
                                      sent.error().message, req.request_id);
    }
    return std::move(sent.value());
  }

 private:
  token::SigningKey key_;
  std::shared_ptr<Clock> clock_;
  std::shared_ptr<net::PolicyPort> policy_;
  std::shared_ptr<Forwarder> next_;
  std::string next_target_;
};

// Terminal service for the plain-header flow: policy check, then the
// config write itself.
class HeaderTrustConfigBackend final : public Backend {
 public:
  HeaderTrustConfigBackend(std::shared_ptr<net::PolicyPort> policy,
                           std::shared_ptr<configsvc::ConfigService> service)
      : policy_(std::move(policy)), service_(std::move(service)) {}

  BackendResponse handle(const ForwardedRequest& req) override {
    const std::string required =
        req.method == "GET" ? "config.get" : "config.put";
    if (req.username_header.empty() ||
        policy_->check(req.username_header, required) !=
            policy::Decision::kAllow) {
      return backends::error_response(403, "permission_denied",
                                      "policy refused " + required,
                                      req.request_id);
    }
    return service_->handle_trusted(req, req.username_header);
  }

 private:
  std::shared_ptr<net::PolicyPort> policy_;
  std::shared_ptr<configsvc::ConfigService> service_;
};

}  // namespace

struct Harness::Impl {
  FlowMode mode;
  int depth;
  std::shared_ptr<Clock> clock;
  AuditLog audit;

  std::shared_ptr<store::Store> data_store;
  std::shared_ptr<store::Store> vault_store;
  std::shared_ptr<vault::Vault> vault;
  std::shared_ptr<policy::PolicyEngine> policy;
  std::shared_ptr<identity::IdentityService> identity;
  std::shared_ptr<configsvc::ConfigService> config_service;

  std::vector<std::shared_ptr<CountingBackend>> chain;  // head first
  std::vector<std::unique_ptr<net::BackendServer>> servers;
  std::unique_ptr<net::PolicyServer> policy_server;
  std::shared_ptr<Forwarder> gateway_forwarder;
  std::unique_ptr<gateway::Gateway> gateway;
  std::unique_ptr<net::GatewayServer> gateway_server;

  std::string owner_token;
  std::string limited_token;
  bool started = false;
};

Harness::Harness(FlowMode mode, int chain_depth, std::shared_ptr<Clock> clock)
    : impl_(std::make_unique<Impl>()) {
  impl_->mode = mode;
  impl_->depth = chain_depth;
  impl_->clock = clock ? std::move(clock) : system_clock();
}

Harness::~Harness() {
  if (impl_->gateway_server) impl_->gateway_server->stop();
  if (impl_->policy_server) impl_->policy_server->stop();
  for (auto& s : impl_->servers) s->stop();
}

store::Store& Harness::data_store() { return *impl_->data_store; }

policy::PolicyStats Harness::policy_stats() const {
  return impl_->policy->stats();
}

Result<void> Harness::start() {
  auto& impl = *impl_;
  impl.data_store = store::make_memory_store();
  impl.vault_store = store::make_memory_store();

  // Light KDF: setup cost is not what this harness measures.
  vault::VaultConfig vault_config;
  vault_config.kdf = crypto::ScryptParams{1024, 8, 1};
  impl.vault = std::make_shared<vault::Vault>(impl.vault_store, impl.clock,
                                              vault_config);
  impl.policy =
      std::make_shared<policy::PolicyEngine>(impl.data_store, &impl.audit);
  impl.identity = std::make_shared<identity::IdentityService>(
      impl.data_store, impl.vault, impl.policy, impl.clock,
      identity::IdentityConfig{}, &impl.audit);

  auto key = impl.vault->active_signing_key();
  if (!key) return key.error();

  impl.config_service = std::make_shared<configsvc::ConfigService>(
      impl.data_store, key.value(), impl.clock);

  // Two accounts: the owner holds every permission, the limited member
  // holds none.
  identity::RegistrationRequest owner;
  owner.username = kOwner;
  owner.password = kPassword;
  if (auto r = impl.identity->register_user(owner); !r) {
    return make_error(Errc::kHarnessSetup,
                      "owner registration failed: " + r.error().message);
  }
  auto member =
      impl.identity->add_member(kOwner, kOwner, kLimited, kPassword);
  if (!member) {
    return make_error(Errc::kHarnessSetup,
                      "member setup failed: " + member.error().message);
  }

  if (impl.mode == FlowMode::kWithIam) {
    auto owner_login = impl.vault->authenticate(kOwner, kPassword);
    auto limited_login = impl.vault->authenticate(kLimited, kPassword);
    if (!owner_login || !limited_login) {
      return make_error(Errc::kHarnessSetup, "login failed during setup");
    }
    impl.owner_token = owner_login.value().token_value;
    impl.limited_token = limited_login.value().token_value;
  }

  std::shared_ptr<net::PolicyPort> policy_port;
  if (impl.mode == FlowMode::kWithoutIam) {
    impl.policy_server =
        std::make_unique<net::PolicyServer>(impl.policy, "127.0.0.1");
    if (auto started = impl.policy_server->start(); !started) return started;
    policy_port = std::make_shared<net::HttpPolicyPort>(
        "127.0.0.1", impl.policy_server->port());
  }

  // Build the chain back to front; each element gets a loopback server and
  // the previous element forwards to it.
  std::shared_ptr<Backend> terminal;
  if (impl.mode == FlowMode::kWithIam) {
    terminal = impl.config_service;
  } else {
    terminal = std::make_shared<HeaderTrustConfigBackend>(policy_port,
                                                          impl.config_service);
  }
  auto counted_terminal = std::make_shared<CountingBackend>(terminal);

  std::shared_ptr<CountingBackend> downstream = counted_terminal;
  std::vector<std::shared_ptr<CountingBackend>> chain{counted_terminal};
  for (int i = impl.depth - 1; i >= 1; --i) {
    auto server =
        std::make_unique<net::BackendServer>(downstream, "127.0.0.1");
    if (auto started = server->start(); !started) return started;
    auto next = std::make_shared<net::HttpForwarder>();
    next->bind("next", server->host(), server->port());
    impl.servers.push_back(std::move(server));

    std::shared_ptr<Backend> node;
    if (impl.mode == FlowMode::kWithIam) {
      node = std::make_shared<ChainService>(key.value(), impl.clock, next,
                                            "next");
    } else {
      node = std::make_shared<ChainService>(policy_port, next, "next");
    }
    downstream = std::make_shared<CountingBackend>(node);
    chain.push_back(downstream);
  }
  std::reverse(chain.begin(), chain.end());
  impl.chain = std::move(chain);

  auto head_server =
      std::make_unique<net::BackendServer>(impl.chain.front(), "127.0.0.1");
  if (auto started = head_server->start(); !started) return started;

  auto gateway_forwarder = std::make_shared<net::HttpForwarder>();
  gateway_forwarder->bind("configsvc", head_server->host(),
                          head_server->port());
  impl.servers.push_back(std::move(head_server));
  impl.gateway_forwarder = gateway_forwarder;

  gateway::GatewayConfig gw_config;
  gw_config.mode = impl.mode == FlowMode::kWithIam
                       ? gateway::Mode::kIam
                       : gateway::Mode::kPassthrough;
  impl.gateway = std::make_unique<gateway::Gateway>(
      gateway::RouteTable::bundled(), impl.vault, impl.policy,
      impl.gateway_forwarder, key.value(), impl.clock, gw_config, &impl.audit);

  impl.gateway_server = std::make_unique<net::GatewayServer>(
      *impl.gateway, "127.0.0.1", 0);
  if (auto started = impl.gateway_server->start(); !started) return started;
  impl.started = true;
  return {};
}

Result<FlowMetrics> Harness::run(const FlowSpec& spec) {
  if (auto valid = spec.validate(); !valid) {
    return Result<FlowMetrics>(valid.error());
  }
  auto& impl = *impl_;
  if (!impl.started) {
    if (auto started = start(); !started) {
      return Result<FlowMetrics>(started.error());
    }
  }
  if (spec.mode != impl.mode || spec.chain_depth != impl.depth) {
    return Result<FlowMetrics>(make_error(
        Errc::kHarnessSetup, "spec does not match the wired harness"));
  }

  const int gw_port = impl.gateway_server->port();
  const auto authorized_count = static_cast<int>(
      std::llround(spec.authorized_fraction * spec.n_requests));

  auto issue = [&](httplib::Client& cli, int i, bool warmup,
                   bool authorized) -> std::pair<int, double> {
    httplib::Headers headers;
    if (impl.mode == FlowMode::kWithIam) {
      headers.emplace("Authorization",
                      "Bearer " + (authorized ? impl.owner_token
                                              : impl.limited_token));
    } else {
      headers.emplace(std::string(kUsernameHeader),
                      authorized ? kOwner : kLimited);
    }
    const std::string path = warmup
                                 ? "/api/v1/configs/warmup/w" + std::to_string(i)
                                 : "/api/v1/configs/bench/cfg-" + std::to_string(i);
    const std::string body = "payload-" + std::to_string(i);
    const auto begin = std::chrono::steady_clock::now();
    auto result = cli.Put(path, headers, body, "application/octet-stream");
    const auto end = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(end - begin).count();
    // transport failures map below zero, keyed by the client error code
    return {result ? result->status : -static_cast<int>(result.error()), ms};
  };

  std::vector<double> latencies(static_cast<std::size_t>(spec.n_requests), 0.0);
  std::vector<int> statuses(static_cast<std::size_t>(spec.n_requests), 0);
  std::vector<unsigned char> ok(static_cast<std::size_t>(spec.n_requests), 0);
  std::vector<unsigned char> was_authorized(
      static_cast<std::size_t>(spec.n_requests), 0);
  std::atomic<int> warm_cursor{0};
  std::atomic<int> cursor{0};
  const auto warm_authorized_count = static_cast<int>(
      std::llround(spec.authorized_fraction * spec.warmup_requests));

  // Warm-up flows through the same worker connections that take the
  // measurement, with the same authorized mix, so no request of either
  // flow pays first-connection costs. The barrier zeroes the meters once
  // every worker is warm.
  std::chrono::steady_clock::time_point wall_begin;
  std::barrier sync(spec.concurrency, [&]() noexcept {
    impl.policy->reset_stats();
    impl.gateway_forwarder->reset_counters();
    for (auto& node : impl.chain) node->reset();
    wall_begin = std::chrono::steady_clock::now();
  });

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(spec.concurrency));
  for (int w = 0; w < spec.concurrency; ++w) {
    workers.emplace_back([&] {
      httplib::Client cli("127.0.0.1", gw_port);
      cli.set_keep_alive(true);
      cli.set_tcp_nodelay(true);
      cli.set_read_timeout(60, 0);
      while (true) {
        const int i = warm_cursor.fetch_add(1);
        if (i >= spec.warmup_requests) break;
        (void)issue(cli, i, true, i < warm_authorized_count);
      }
      sync.arrive_and_wait();
      while (true) {
        const int i = cursor.fetch_add(1);
        if (i >= spec.n_requests) break;
        const bool authorized = i < authorized_count;
        const auto [status, ms] = issue(cli, i, false, authorized);
        latencies[static_cast<std::size_t>(i)] = ms;
        statuses[static_cast<std::size_t>(i)] = status;
        was_authorized[static_cast<std::size_t>(i)] =
            authorized ? 1 : 0;
        const bool expected = authorized ? status == 201 : status == 403;
        ok[static_cast<std::size_t>(i)] = expected ? 1 : 0;
      }
    });
  }
  for (auto& t : workers) t.join();
  const auto wall_end = std::chrono::steady_clock::now();

  std::size_t failures = 0;
  std::map<int, int> unexpected;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (!ok[i]) {
      ++failures;
      ++unexpected[statuses[i]];
    }
  }
  if (failures > 0) {
    // Partial-failure runs are discarded, not averaged.
    std::string histogram;
    for (const auto& [status, n] : unexpected) {
      histogram += " " + std::to_string(status) + "x" + std::to_string(n);
    }
    return Result<FlowMetrics>(make_error(
        Errc::kHarnessSetup,
        std::to_string(failures) +
            " requests returned unexpected statuses:" + histogram));
  }

  FlowMetrics metrics;
  metrics.per_request_latency_ms = std::move(latencies);
  metrics.total_wall_ms =
      std::chrono::duration<double, std::milli>(wall_end - wall_begin).count();
  metrics.throughput_req_min =
      spec.n_requests / (metrics.total_wall_ms / 60000.0);

  double reject_sum = 0;
  std::uint64_t reject_count = 0;
  for (std::size_t i = 0; i < metrics.per_request_latency_ms.size(); ++i) {
    if (!was_authorized[i]) {
      reject_sum += metrics.per_request_latency_ms[i];
      ++reject_count;
    }
  }
  metrics.rejected = reject_count;
  metrics.completed = static_cast<std::uint64_t>(spec.n_requests);
  metrics.reject_latency_mean_ms =
      reject_count == 0 ? 0.0 : reject_sum / static_cast<double>(reject_count);

  const auto stats = impl.policy->stats();
  metrics.policy_effective_calls = stats.effective_calls;
  metrics.policy_check_calls = stats.check_calls;
  metrics.first_service_invocations = impl.chain.front()->received();
  return metrics;
}

Result<FlowMetrics> run_flow(const FlowSpec& spec) {
  if (auto valid = spec.validate(); !valid) {
    return Result<FlowMetrics>(valid.error());
  }
  Harness harness(spec.mode, spec.chain_depth);
  return harness.run(spec);
}

std::string CompareReport::to_text() const {
  std::ostringstream out;
  out << "flow comparison (depth=" << chain_depth
      << ", concurrency=" << concurrency << ")\n";
  out << std::setw(8) << "n" << std::setw(16) << "with-iam" << std::setw(16)
      << "without-iam" << std::setw(10) << "ratio" << '\n';
  for (const auto& row : rows) {
    out << std::setw(8) << row.n << std::setw(14) << std::fixed
        << std::setprecision(0) << row.with_iam_total_ms << "ms"
        << std::setw(14) << row.without_iam_total_ms << "ms" << std::setw(10)
        << std::setprecision(2) << row.ratio << '\n';
  }
  out << "throughput: with-iam ~ " << std::setprecision(0)
      << with_iam_throughput_req_min << " req/min, without-iam ~ "
      << without_iam_throughput_req_min << " req/min\n";
  out << "unauthorized reject latency: with-iam ~ " << std::setprecision(2)
      << with_iam_reject_mean_ms << " ms, without-iam ~ "
      << without_iam_reject_mean_ms << " ms\n";
  return out.str();
}

std::string CompareReport::to_json_text() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    rows_json.push_back(json{{"n", row.n},
                             {"with_iam_ms", row.with_iam_total_ms},
                             {"without_iam_ms", row.without_iam_total_ms},
                             {"ratio", row.ratio}});
  }
  json doc{{"chain_depth", chain_depth},
           {"concurrency", concurrency},
           {"rows", std::move(rows_json)},
           {"with_iam_throughput_req_min", with_iam_throughput_req_min},
           {"without_iam_throughput_req_min", without_iam_throughput_req_min},
           {"with_iam_reject_mean_ms", with_iam_reject_mean_ms},
           {"without_iam_reject_mean_ms", without_iam_reject_mean_ms}};
  return doc.dump(2);
}

Result<CompareReport> compare_flows(const std::vector<int>& n_list, int depth,
                                    int concurrency,
                                    int reject_probe_requests) {
  if (n_list.empty()) {
    return Result<CompareReport>(
        make_error(Errc::kConfigInvalid, "n_list must not be empty"));
  }
  CompareReport report;
  report.chain_depth = depth;
  report.concurrency = concurrency;

  for (int n : n_list) {
    FlowSpec with_spec{FlowMode::kWithIam, n, depth, concurrency, 1.0};
    auto with = run_flow(with_spec);
    if (!with) return Result<CompareReport>(with.error());

    FlowSpec without_spec{FlowMode::kWithoutIam, n, depth, concurrency, 1.0};
    auto without = run_flow(without_spec);
    if (!without) return Result<CompareReport>(without.error());

    CompareRow row;
    row.n = n;
    row.with_iam_total_ms = with.value().total_wall_ms;
    row.without_iam_total_ms = without.value().total_wall_ms;
    row.ratio = without.value().total_wall_ms > 0
                    ? with.value().total_wall_ms /
                          without.value().total_wall_ms
                    : 0.0;
    report.rows.push_back(row);
    report.with_iam_throughput_req_min = with.value().throughput_req_min;
    report.without_iam_throughput_req_min = without.value().throughput_req_min;
  }

  FlowSpec with_reject{FlowMode::kWithIam, reject_probe_requests, depth,
                       concurrency, 0.0};
  auto with = run_flow(with_reject);
  if (!with) return Result<CompareReport>(with.error());
  FlowSpec without_reject{FlowMode::kWithoutIam, reject_probe_requests, depth,
                          concurrency, 0.0};
  auto without = run_flow(without_reject);
  if (!without) return Result<CompareReport>(without.error());
  report.with_iam_reject_mean_ms = with.value().reject_latency_mean_ms;
  report.without_iam_reject_mean_ms = without.value().reject_latency_mean_ms;
  return report;
}

}  // namespace edgeiam::bench
