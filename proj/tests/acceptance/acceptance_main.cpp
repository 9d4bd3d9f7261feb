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

// Acceptance suite: one scenario per criterion, one pass/fail line each.
// Run with no arguments for the full suite or with a criterion number.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "../support.hpp"
#include "edgeiam/app.hpp"
#include "edgeiam/bench.hpp"

using namespace edgeiam;
using testsupport::TestStack;
using testsupport::expect;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(std::random_device{}());
  return gen;
}

std::string random_name(const std::string& prefix) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string out = prefix;
  for (int i = 0; i < 10; ++i) {
    out.push_back(alphabet[rng()() % (sizeof(alphabet) - 1)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. Freshness: a permission revocation takes effect for the very next
//    request even though the access token is untouched and unexpired.

void criterion_1_freshness(std::ostringstream& detail) {
  TestStack stack;
  for (int rep = 0; rep < 100; ++rep) {
    const std::string user = random_name("owner.");
    const std::string org = random_name("org.");
    const std::string ns = random_name("ns");
    const std::string cfg = random_name("cfg-") + ".yaml";
    const std::string payload = random_name("payload ");

    const std::string tok = stack.register_and_login(user, "s3cretpw!", org);

    auto put = stack.call("PUT", "/api/v1/configs/" + ns + "/" + cfg, payload,
                          tok);
    expect(put.status == 201, "rep " + std::to_string(rep) +
                                  ": initial put was " +
                                  std::to_string(put.status));

    nlohmann::json revoke{{"subject", {{"kind", "USER"}, {"id", user}}},
                          {"name", "config.put"},
                          {"kind", "ALLOW"}};
    auto revoked = stack.call("DELETE", "/api/v1/orgs/" + org + "/permissions",
                              revoke.dump(), tok);
    expect(revoked.status == 204, "rep " + std::to_string(rep) +
                                      ": revoke was " +
                                      std::to_string(revoked.status));

    // Same access token, still valid at the vault.
    expect(stack.vault->verify_token(tok).ok(), "token should still verify");
    auto retry = stack.call("PUT", "/api/v1/configs/" + ns + "/" + cfg,
                            payload + " v2", tok);
    expect(retry.status == 403, "rep " + std::to_string(rep) +
                                    ": retry after revoke was " +
                                    std::to_string(retry.status));

    auto entry = stack.config_service->get_entry(ns, cfg);
    expect(entry.ok() && entry.value().has_value(), "entry must exist");
    expect(entry.value()->version == 1,
           "rep " + std::to_string(rep) + ": store holds version " +
               std::to_string(entry.value()->version));
    expect(entry.value()->payload == payload, "first payload must survive");
  }
  detail << "100/100 repetitions";
}

// ---------------------------------------------------------------------------
// 2. Saga rollback: every injection point, both backends, byte-identical
//    store afterwards and no credential left in the vault.

struct SagaRig {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  AuditLog audit;
  std::shared_ptr<store::Store> data_store;
  std::shared_ptr<store::Store> vault_store;
  std::shared_ptr<vault::Vault> vault;
  std::shared_ptr<policy::PolicyEngine> policy;
  std::shared_ptr<identity::IdentityService> identity;
  std::filesystem::path root;  // empty for memory

  explicit SagaRig(bool file_backed) {
    if (file_backed) {
      root = std::filesystem::temp_directory_path() /
             ("edgeiam-saga-" + crypto::uuid4());
      data_store = store::make_file_store(root / "data").value();
      vault_store = store::make_file_store(root / "vault").value();
    } else {
      data_store = store::make_memory_store();
      vault_store = store::make_memory_store();
    }
    vault = std::make_shared<vault::Vault>(
        vault_store, clock,
        vault::VaultConfig{3600, testsupport::light_kdf()});
    policy = std::make_shared<policy::PolicyEngine>(data_store, &audit);
    identity = std::make_shared<identity::IdentityService>(
        data_store, vault, policy, clock, identity::IdentityConfig{}, &audit);
  }

  ~SagaRig() {
    identity.reset();
    if (!root.empty()) std::filesystem::remove_all(root);
  }
};

void criterion_2_saga_rollback(std::ostringstream& detail) {
  struct Injection {
    int step;
    bool vault_store;
    std::uint64_t countdown;
  };
  const std::vector<Injection> injections = {
      {1, true, 0}, {2, false, 1}, {3, false, 2}, {4, false, 5}};

  int cases = 0;
  for (bool file_backed : {false, true}) {
    for (const auto& injection : injections) {
      SagaRig rig(file_backed);
      const std::string data_before =
          testsupport::snapshot_store(*rig.data_store);
      const std::string vault_before =
          testsupport::snapshot_store(*rig.vault_store);
      const std::string tree_before =
          file_backed ? testsupport::snapshot_tree(rig.root) : "";

      identity::RegistrationRequest req;
      req.username = "alice";
      req.password = "s3cretpw!";
      req.personal_info = {{"name", "Alice"}};

      (injection.vault_store ? rig.vault_store : rig.data_store)
          ->fail_after(injection.countdown);
      auto outcome = rig.identity->register_user(req);
      rig.data_store->clear_fault();
      rig.vault_store->clear_fault();

      const std::string tag = std::string(file_backed ? "file" : "memory") +
                              "/step" + std::to_string(injection.step);
      expect(!outcome.ok(), tag + ": registration must fail");
      expect(outcome.error().code == Errc::kRegistrationFailed,
             tag + ": unexpected error " + outcome.error().message);
      expect(outcome.error().step == injection.step,
             tag + ": failed at step " + std::to_string(outcome.error().step));

      expect(testsupport::snapshot_store(*rig.data_store) == data_before,
             tag + ": shared store changed");
      expect(testsupport::snapshot_store(*rig.vault_store) == vault_before,
             tag + ": vault store changed");
      if (file_backed) {
        expect(testsupport::snapshot_tree(rig.root) == tree_before,
               tag + ": on-disk tree changed");
      }
      expect(rig.vault->authenticate("alice", "s3cretpw!").code() ==
                 Errc::kInvalidCredentials,
             tag + ": credential must not survive");
      ++cases;
    }
  }
  detail << cases << "/8 deterministic cases";
}

// ---------------------------------------------------------------------------
// 3. Flow ordering at desk scale, plus exact policy-call accounting.

void criterion_3_flow_ordering(std::ostringstream& detail) {
  const int depth = 3;
  const int concurrency = 8;
  const std::vector<int> n_list = {10, 500, 1000};

  std::map<int, double> with_ms;
  std::map<int, double> without_ms;

  for (int n : n_list) {
    bench::FlowSpec with_spec{bench::FlowMode::kWithIam, n, depth, concurrency,
                              1.0};
    auto with = bench::run_flow(with_spec);
    expect(with.ok(), "with-iam n=" + std::to_string(n) + " failed: " +
                          (with.ok() ? "" : with.error().message));
    expect(with.value().policy_effective_calls ==
               static_cast<std::uint64_t>(n),
           "with-iam must make exactly n policy resolutions, saw " +
               std::to_string(with.value().policy_effective_calls));
    expect(with.value().policy_check_calls == 0,
           "with-iam downstream must not call the policy engine");

    bench::FlowSpec without_spec{bench::FlowMode::kWithoutIam, n, depth,
                                 concurrency, 1.0};
    auto without = bench::run_flow(without_spec);
    expect(without.ok(), "without-iam n=" + std::to_string(n) + " failed: " +
                             (without.ok() ? "" : without.error().message));
    expect(without.value().policy_check_calls ==
               static_cast<std::uint64_t>(n) * depth,
           "without-iam must make n*depth policy checks, saw " +
               std::to_string(without.value().policy_check_calls));
    expect(without.value().policy_effective_calls == 0,
           "without-iam edge must not resolve permissions");

    with_ms[n] = with.value().total_wall_ms;
    without_ms[n] = without.value().total_wall_ms;
  }

  for (int n : n_list) {
    if (n >= 500) {
      expect(with_ms[n] <= without_ms[n],
             "with-iam must not be slower at n=" + std::to_string(n) + " (" +
                 std::to_string(with_ms[n]) + " vs " +
                 std::to_string(without_ms[n]) + " ms)");
    }
  }
  const double ratio_10 = with_ms[10] / without_ms[10];
  const double ratio_1000 = with_ms[1000] / without_ms[1000];
  expect(ratio_1000 <= ratio_10,
         "ratio must not grow with n: ratio(1000)=" + std::to_string(ratio_1000) +
             " ratio(10)=" + std::to_string(ratio_10));

  detail << std::fixed << std::setprecision(0);
  for (int n : n_list) {
    detail << "n=" << n << ": " << with_ms[n] << "ms vs " << without_ms[n]
           << "ms; ";
  }
  detail << std::setprecision(2) << "ratio 10->1000: " << ratio_10 << "->"
         << ratio_1000;
}

// ---------------------------------------------------------------------------
// 4. Fast rejection at the edge: cheaper than letting services ask the
//    policy engine, and no backend is ever touched.

void criterion_4_fast_reject(std::ostringstream& detail) {
  const int depth = 3;
  const int concurrency = 4;
  const int n = 200;

  bench::FlowSpec with_spec{bench::FlowMode::kWithIam, n, depth, concurrency,
                            0.0};
  auto with = bench::run_flow(with_spec);
  expect(with.ok(), "with-iam reject run failed");
  expect(with.value().rejected == static_cast<std::uint64_t>(n),
         "every request must be rejected");
  expect(with.value().first_service_invocations == 0,
         "rejected requests must never reach a service, saw " +
             std::to_string(with.value().first_service_invocations));

  bench::FlowSpec without_spec{bench::FlowMode::kWithoutIam, n, depth,
                               concurrency, 0.0};
  auto without = bench::run_flow(without_spec);
  expect(without.ok(), "without-iam reject run failed");
  expect(without.value().rejected == static_cast<std::uint64_t>(n),
         "every request must be rejected downstream");

  expect(with.value().reject_latency_mean_ms <
             without.value().reject_latency_mean_ms,
         "edge rejection must be faster: " +
             std::to_string(with.value().reject_latency_mean_ms) + " vs " +
             std::to_string(without.value().reject_latency_mean_ms) + " ms");
  detail << std::fixed << std::setprecision(2)
         << with.value().reject_latency_mean_ms << " ms vs "
         << without.value().reject_latency_mean_ms << " ms mean reject";
}

// ---------------------------------------------------------------------------
// 5. JWT golden vectors, frozen from an independent reference
//    implementation (tests/tools/make_jwt_vectors.py).

struct GoldenVector {
  const char* label;
  std::string key;
  token::PermissionClaims claims;
  std::string compact;
};

std::vector<GoldenVector> golden_vectors() {
  std::vector<GoldenVector> out;
  out.push_back(GoldenVector{
      "single allow permission",
      std::string(32, '\x0b'),
      {"alice", 1700000000, 1700000005,
       "00000000-0000-0000-0000-000000000000",
       {"config.put|ALLOW|p1"}},
      "eyJhbGciOiJIUzI1NiIsInR5cCI6IkpXVCJ9."
      "eyJleHAiOjE3MDAwMDAwMDUsImlhdCI6MTcwMDAwMDAwMCwianRpIjoiMDAwMDAwMDAtMDAw"
      "MC0wMDAwLTAwMDAtMDAwMDAwMDAwMDAwIiwicGVybWlzc2lvbnMiOlsiY29uZmlnLnB1dHxB"
      "TExPV3xwMSJdLCJzdWIiOiJhbGljZSJ9."
      "ib4yY85dkaimD8QTByz6hdOSqBtDsIrC5sEFovin204"});

  std::string counting_key;
  for (int i = 0; i < 32; ++i) counting_key.push_back(static_cast<char>(i));
  out.push_back(GoldenVector{
      "empty permission list",
      counting_key,
      {"bob", 1712345678, 1712345683,
       "123e4567-e89b-42d3-a456-426614174000",
       {}},
      "eyJhbGciOiJIUzI1NiIsInR5cCI6IkpXVCJ9."
      "eyJleHAiOjE3MTIzNDU2ODMsImlhdCI6MTcxMjM0NTY3OCwianRpIjoiMTIzZTQ1NjctZTg5"
      "Yi00MmQzLWE0NTYtNDI2NjE0MTc0MDAwIiwicGVybWlzc2lvbnMiOltdLCJzdWIiOiJib2Ii"
      "fQ.6wiebePOC8aObZ2W2bD3_DYuz3cWDnDnOcFGdwy_tGw"});

  out.push_back(GoldenVector{
      "mixed allow deny set",
      std::string(32, '\x42'),
      {"carol.ops-1", 1699999999, 1700000004,
       "ffffffff-ffff-4fff-8fff-ffffffffffff",
       {"config.get|ALLOW|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a111",
        "ns.read|DENY|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a222",
        "org.member.add|ALLOW|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a333"}},
      "eyJhbGciOiJIUzI1NiIsInR5cCI6IkpXVCJ9."
      "eyJleHAiOjE3MDAwMDAwMDQsImlhdCI6MTY5OTk5OTk5OSwianRpIjoiZmZmZmZmZmYtZmZm"
      "Zi00ZmZmLThmZmYtZmZmZmZmZmZmZmZmIiwicGVybWlzc2lvbnMiOlsiY29uZmlnLmdldHxB"
      "TExPV3w1ZjJjNmIxYS05ZDNlLTRjN2YtOGEyMS0wYjY0ZDllM2ExMTEiLCJucy5yZWFkfERF"
      "Tll8NWYyYzZiMWEtOWQzZS00YzdmLThhMjEtMGI2NGQ5ZTNhMjIyIiwib3JnLm1lbWJlci5h"
      "ZGR8QUxMT1d8NWYyYzZiMWEtOWQzZS00YzdmLThhMjEtMGI2NGQ5ZTNhMzMzIl0sInN1YiI6"
      "ImNhcm9sLm9wcy0xIn0.B2v_YTx33Q9HcpicHnX0_l3wiePXvciNaTdk4Z_B4NA"});
  return out;
}

void criterion_5_jwt_vectors(std::ostringstream& detail) {
  int mutations_checked = 0;
  for (const auto& vec : golden_vectors()) {
    const token::SigningKey key{"golden", vec.key, 0};
    const std::string minted = token::mint(vec.claims, key);
    expect(minted == vec.compact,
           std::string(vec.label) + ": mint diverges from the oracle");

    auto verified = token::verify(vec.compact, key, vec.claims.iat + 1);
    expect(verified.ok(), std::string(vec.label) + ": verify refused");
    expect(verified.value() == vec.claims,
           std::string(vec.label) + ": claims roundtrip mismatch");

    for (int i = 0; i < 24; ++i) {
      const std::size_t pos = vec.compact.size() * i / 24;
      std::string mutated = vec.compact;
      char replacement = mutated[pos] == 'A' ? 'B' : 'A';
      if (mutated[pos] == '.') replacement = 'x';
      mutated[pos] = replacement;
      auto outcome = token::verify(mutated, key, vec.claims.iat + 1);
      expect(!outcome.ok(), std::string(vec.label) + ": mutation at " +
                                std::to_string(pos) + " was accepted");
      ++mutations_checked;
    }
  }
  detail << "3 vectors byte-exact, " << mutations_checked
         << " mutations rejected";
}

// ---------------------------------------------------------------------------
// 6. Policy engine vs the literal brute-force resolver.

void criterion_6_policy_oracle(std::ostringstream& detail) {
  std::mt19937 gen(424242);
  const std::vector<std::string> names = {"config.put", "config.get",
                                          "ns.read",    "ns.create",
                                          "org.perm.grant", "deep.a.b"};
  int comparisons = 0;
  for (int instance = 0; instance < 500; ++instance) {
    std::shared_ptr<store::Store> backing = store::make_memory_store();
    policy::PolicyEngine engine(backing);
    testsupport::OracleWorld world;

    std::vector<std::string> orgs;
    std::vector<std::string> users;
    const int n_orgs = 1 + static_cast<int>(gen() % 3);
    const int n_users = 1 + static_cast<int>(gen() % 5);
    for (int o = 0; o < n_orgs; ++o) {
      orgs.push_back("org" + std::to_string(o));
      testsupport::fabricate_org(*backing, orgs.back());
    }
    for (int u = 0; u < n_users; ++u) {
      users.push_back("user" + std::to_string(u));
      testsupport::fabricate_user(*backing, users.back(), "org0");
      if (gen() % 4 != 0) {
        const auto& parent = orgs[gen() % orgs.size()];
        expect(engine.add_inheritance(users.back(), parent).ok(),
               "inheritance setup failed");
        world.user_org[users.back()] = parent;
      } else {
        world.user_org[users.back()] = "";
      }
    }

    const int n_grants = static_cast<int>(gen() % 14);
    for (int g = 0; g < n_grants; ++g) {
      const bool to_user = gen() % 2 == 0;
      const auto kind =
          gen() % 2 == 0 ? policy::Kind::kAllow : policy::Kind::kDeny;
      const auto& name = names[gen() % names.size()];
      policy::Subject subject =
          to_user ? policy::Subject::user(users[gen() % users.size()])
                  : policy::Subject::org(orgs[gen() % orgs.size()]);
      auto granted = engine.grant(subject, name, kind);
      expect(granted.ok(), "grant setup failed");
      world.grants.push_back(
          testsupport::OracleGrant{(to_user ? "u:" : "o:") + subject.id, name,
                                   kind, granted.value().id});
    }

    for (const auto& user : users) {
      auto got = engine.effective_permissions(user);
      expect(got.ok(), "resolution failed");
      const auto want = testsupport::oracle_effective(world, user);
      const std::string tag =
          "instance " + std::to_string(instance) + " user " + user;
      expect(got.value().size() == want.size(), tag + ": size mismatch");
      for (std::size_t i = 0; i < want.size(); ++i) {
        expect(got.value()[i].id == want[i].id &&
                   got.value()[i].name == want[i].name &&
                   got.value()[i].kind == want[i].kind,
               tag + ": entry " + std::to_string(i) + " differs");
      }
      ++comparisons;
    }
  }
  detail << "500 instances, " << comparisons << " user resolutions";
}

// ---------------------------------------------------------------------------
// 7. Gateway status discipline with backend and policy call accounting.

void criterion_7_status_matrix(std::ostringstream& detail) {
  TestStack stack;
  (void)stack.register_and_login("alice", "s3cretpw!", "acme");
  expect(stack.identity->add_member("acme", "alice", "bob", "temp-pass-1").ok(),
         "member setup");
  expect(
      stack.identity->add_member("acme", "alice", "carol", "temp-pass-2").ok(),
      "member setup");
  expect(stack.policy
             ->grant(policy::Subject::user("carol"), "config.put",
                     policy::Kind::kDeny)
             .ok(),
         "deny grant setup");

  auto stale = stack.vault->authenticate("alice", "s3cretpw!");
  expect(stale.ok(), "login for the to-be-expired token");
  stack.clock->advance(3601);

  const std::string owner =
      stack.vault->authenticate("alice", "s3cretpw!").value().token_value;
  const std::string bob =
      stack.vault->authenticate("bob", "temp-pass-1").value().token_value;
  const std::string carol =
      stack.vault->authenticate("carol", "temp-pass-2").value().token_value;

  struct Case {
    const char* label;
    std::string bearer;
    int expected_status;
    std::uint64_t backend_calls;
    std::uint64_t policy_calls;
  };
  const std::vector<Case> cases = {
      {"no token", "", 401, 0, 0},
      {"garbage token", std::string(43, 'Z'), 401, 0, 0},
      {"expired token", stale.value().token_value, 401, 0, 0},
      {"valid, no grant", bob, 403, 0, 1},
      {"valid, deny grant", carol, 403, 0, 1},
      {"valid, allow grant", owner, 201, 1, 1},
  };

  for (const auto& c : cases) {
    stack.policy->reset_stats();
    stack.forwarder->reset_counters();
    auto resp = stack.call("PUT", "/api/v1/configs/dev/app.yaml", "x: 1",
                           c.bearer);
    expect(resp.status == c.expected_status,
           std::string(c.label) + ": status " + std::to_string(resp.status) +
               " wanted " + std::to_string(c.expected_status));
    expect(stack.forwarder->sent_total() == c.backend_calls,
           std::string(c.label) + ": backend calls " +
               std::to_string(stack.forwarder->sent_total()));
    expect(stack.policy->stats().effective_calls == c.policy_calls,
           std::string(c.label) + ": policy calls " +
               std::to_string(stack.policy->stats().effective_calls));
  }
  detail << "statuses {401,401,401,403,403,201}, backend calls {0,0,0,0,0,1}";
}

// ---------------------------------------------------------------------------
// 8. Registration contract: default org naming, org uniqueness, the full
//    permission catalog for fresh owners.

void criterion_8_registration_contract(std::ostringstream& detail) {
  TestStack stack;

  identity::RegistrationRequest req;
  req.username = "alice";
  req.password = "s3cretpw!";
  auto user = stack.identity->register_user(req);
  expect(user.ok(), "registration failed");
  expect(user.value().org == "alice", "default org must equal the username");
  expect(user.value().role == identity::Role::kOwner, "registrant owns org");

  identity::RegistrationRequest imposter;
  imposter.username = "mallory";
  imposter.password = "s3cretpw!";
  imposter.org_name = "alice";
  expect(stack.identity->register_user(imposter).code() ==
             Errc::kOrganizationExists,
         "owning an existing organization must be forbidden");

  auto grants = stack.policy->direct_grants(policy::Subject::user("alice"));
  expect(grants.ok(), "grant listing failed");
  expect(grants.value().size() == 8,
         "owner must hold all 8 catalog permissions, holds " +
             std::to_string(grants.value().size()));
  for (const auto& g : grants.value()) {
    expect(g.kind == policy::Kind::kAllow, "owner grants must be ALLOW");
  }
  auto count = stack.policy->assign_all("alice", "alice");
  expect(count.ok() && count.value() == 8,
         "assign_all must report the catalog size");

  for (const auto& name : policy::system_permissions()) {
    expect(stack.policy->check("alice", name) == policy::Decision::kAllow,
           "owner must be allowed " + name);
  }
  detail << "default org, uniqueness, 8/8 catalog grants";
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  std::function<void(std::ostringstream&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "freshness under revocation", 10.0, criterion_1_freshness},
      {2, "registration saga rollback", 5.0, criterion_2_saga_rollback},
      {3, "flow wall-time ordering", 300.0, criterion_3_flow_ordering},
      {4, "fast rejection at the edge", 30.0, criterion_4_fast_reject},
      {5, "jwt golden vectors", 1.0, criterion_5_jwt_vectors},
      {6, "policy oracle equivalence", 10.0, criterion_6_policy_oracle},
      {7, "gateway status discipline", 5.0, criterion_7_status_matrix},
      {8, "registration contract", 2.0, criterion_8_registration_contract},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.number != only) continue;
    std::ostringstream detail;
    const auto begin = std::chrono::steady_clock::now();
    bool passed = true;
    std::string failure;
    try {
      criterion.run(detail);
    } catch (const std::exception& e) {
      passed = false;
      failure = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
            .count();
    if (passed && elapsed >= criterion.budget_s) {
      passed = false;
      failure = "runtime " + std::to_string(elapsed) + "s exceeds budget " +
                std::to_string(criterion.budget_s) + "s";
    }
    if (passed) {
      std::printf("PASS criterion %d: %s — %s [%.2fs]\n", criterion.number,
                  criterion.name, detail.str().c_str(), elapsed);
    } else {
      ++failures;
      std::printf("FAIL criterion %d: %s — %s [%.2fs]\n", criterion.number,
                  criterion.name, failure.c_str(), elapsed);
    }
  }
  return failures;
}
