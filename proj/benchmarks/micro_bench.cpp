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

// Microbenchmarks for the hot paths: token crypto, policy resolution, the
// store, and the in-process gateway pipeline.

#include <benchmark/benchmark.h>

#include <memory>

#include <json.hpp>

#include "edgeiam/backends.hpp"
#include "edgeiam/clock.hpp"
#include "edgeiam/configsvc.hpp"
#include "edgeiam/crypto.hpp"
#include "edgeiam/gateway.hpp"
#include "edgeiam/identity.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/store.hpp"
#include "edgeiam/vault.hpp"

using namespace edgeiam;

namespace {

token::SigningKey bench_key() { return {"bench", std::string(32, '\x2a'), 0}; }

token::PermissionClaims bench_claims(int n_perms) {
  std::vector<policy::Permission> perms;
  perms.reserve(static_cast<std::size_t>(n_perms));
  for (int i = 0; i < n_perms; ++i) {
    perms.push_back(policy::Permission{crypto::uuid4(),
                                       "perm.name" + std::to_string(i),
                                       policy::Kind::kAllow});
  }
  return token::make_claims("alice", perms, 1700000000, 5);
}

void BM_Base64UrlEncode(benchmark::State& state) {
  const std::string input = crypto::random_bytes(
      static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::base64url_encode(input));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Base64UrlEncode)->Arg(64)->Arg(1024);

void BM_HmacSha256(benchmark::State& state) {
  const std::string key = std::string(32, 'k');
  const std::string data = crypto::random_bytes(
      static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::hmac_sha256(key, data));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HmacSha256)->Arg(256)->Arg(4096);

void BM_Scrypt(benchmark::State& state) {
  const crypto::ScryptParams params{
      static_cast<std::uint64_t>(state.range(0)), 8, 1};
  const std::string salt = crypto::random_bytes(16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::scrypt("benchpass-123", salt, params));
  }
}
BENCHMARK(BM_Scrypt)->Arg(1024)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_JwtMint(benchmark::State& state) {
  const auto claims = bench_claims(static_cast<int>(state.range(0)));
  const auto key = bench_key();
  for (auto _ : state) {
    benchmark::DoNotOptimize(token::mint(claims, key));
  }
}
BENCHMARK(BM_JwtMint)->Arg(0)->Arg(8)->Arg(32);

void BM_JwtVerify(benchmark::State& state) {
  const auto claims = bench_claims(static_cast<int>(state.range(0)));
  const auto key = bench_key();
  const std::string jwt = token::mint(claims, key);
  for (auto _ : state) {
    auto outcome = token::verify(jwt, key, 1700000001);
    benchmark::DoNotOptimize(outcome);
  }
}
BENCHMARK(BM_JwtVerify)->Arg(0)->Arg(8)->Arg(32);

void BM_StorePut(benchmark::State& state) {
  auto store = store::make_memory_store();
  const std::string value = nlohmann::json{{"payload", "x"}}.dump();
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        store->put({"configs", "k" + std::to_string(i++ % 1000)}, value));
  }
}
BENCHMARK(BM_StorePut);

void BM_StoreListPrefix(benchmark::State& state) {
  auto store = store::make_memory_store();
  for (int i = 0; i < state.range(0); ++i) {
    (void)store->put({"grants", "u:alice:p" + std::to_string(i) + ":ALLOW"},
                     "{}");
    (void)store->put({"grants", "u:bob:p" + std::to_string(i) + ":ALLOW"},
                     "{}");
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(store->list_prefix("grants", "u:alice:"));
  }
}
BENCHMARK(BM_StoreListPrefix)->Arg(8)->Arg(64);

// Full stack for the pipeline benchmarks.
struct Stack {
  std::shared_ptr<Clock> clock = system_clock();
  std::shared_ptr<store::Store> data = store::make_memory_store();
  std::shared_ptr<store::Store> vault_backing = store::make_memory_store();
  std::shared_ptr<vault::Vault> vault;
  std::shared_ptr<policy::PolicyEngine> policy;
  std::shared_ptr<identity::IdentityService> identity;
  std::shared_ptr<configsvc::ConfigService> config_service;
  std::shared_ptr<InProcessForwarder> forwarder;
  std::unique_ptr<gateway::Gateway> gw;
  std::string token;

  Stack() {
    vault::VaultConfig vc;
    vc.kdf = {1024, 8, 1};
    vault = std::make_shared<vault::Vault>(vault_backing, clock, vc);
    policy = std::make_shared<policy::PolicyEngine>(data);
    identity = std::make_shared<identity::IdentityService>(data, vault, policy,
                                                           clock);
    auto key = vault->active_signing_key().value();
    config_service =
        std::make_shared<configsvc::ConfigService>(data, key, clock);
    forwarder = std::make_shared<InProcessForwarder>();
    forwarder->bind("configsvc", config_service);
    forwarder->bind("identity", std::make_shared<backends::IdentityBackend>(
                                    identity, key, clock));
    forwarder->bind("vault", std::make_shared<backends::AuthBackend>(vault));
    forwarder->bind("policy", std::make_shared<backends::PolicyBackend>(
                                  policy, identity, key, clock));
    gw = std::make_unique<gateway::Gateway>(gateway::RouteTable::bundled(),
                                            vault, policy, forwarder, key,
                                            clock);
    identity::RegistrationRequest req;
    req.username = "alice";
    req.password = "benchpass-123";
    (void)identity->register_user(req);
    token = vault->authenticate("alice", "benchpass-123").value().token_value;
  }
};

void BM_PolicyEffectivePermissions(benchmark::State& state) {
  Stack stack;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stack.policy->effective_permissions("alice"));
  }
}
BENCHMARK(BM_PolicyEffectivePermissions);

void BM_VaultVerifyToken(benchmark::State& state) {
  Stack stack;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stack.vault->verify_token(stack.token));
  }
}
BENCHMARK(BM_VaultVerifyToken);

void BM_GatewayAuthorizedPut(benchmark::State& state) {
  Stack stack;
  HttpRequest req;
  req.method = "PUT";
  req.path = "/api/v1/configs/dev/app.yaml";
  req.body = "retries: 3";
  req.content_type = "application/octet-stream";
  req.set_header("Authorization", "Bearer " + stack.token);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stack.gw->handle_request(req));
  }
}
BENCHMARK(BM_GatewayAuthorizedPut);

void BM_GatewayFastReject(benchmark::State& state) {
  Stack stack;
  HttpRequest req;
  req.method = "PUT";
  req.path = "/api/v1/configs/dev/app.yaml";
  req.body = "retries: 3";
  // No Authorization header: refused before any backend work.
  for (auto _ : state) {
    benchmark::DoNotOptimize(stack.gw->handle_request(req));
  }
}
BENCHMARK(BM_GatewayFastReject);

}  // namespace

BENCHMARK_MAIN();
