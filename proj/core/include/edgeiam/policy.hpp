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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/audit.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/store.hpp"

namespace edgeiam::policy {

enum class Kind { kAllow, kDeny };
enum class SubjectKind { kUser, kOrg };
enum class Decision { kAllow, kDeny };

std::string_view kind_name(Kind kind);                    // "ALLOW" / "DENY"
std::optional<Kind> kind_from(std::string_view name);

struct Subject {
  SubjectKind kind = SubjectKind::kUser;
  std::string id;

  static Subject user(std::string_view name) {
    return {SubjectKind::kUser, std::string(name)};
  }
  static Subject org(std::string_view name) {
    return {SubjectKind::kOrg, std::string(name)};
  }
  bool operator==(const Subject&) const = default;
};

struct Permission {
  std::string id;    // grant-instance id, fresh UUID per creation
  std::string name;  // dotted lowercase, e.g. "config.put"
  Kind kind = Kind::kAllow;

  bool operator==(const Permission&) const = default;
};

// Permission names gateable by routes. Owners receive an ALLOW grant for
// each of these at registration.
const std::vector<std::string>& system_permissions();

bool valid_permission_name(std::string_view name);

struct PolicyStats {
  std::uint64_t effective_calls = 0;
  std::uint64_t check_calls = 0;
};

// ALLOW/DENY grants over users and organizations with single-level
// user -> org inheritance. Resolution re-reads the store on every call;
// nothing is cached, so a revoke is visible to the next query.
//
// Precedence: direct user grants override inherited org grants; within a
// level DENY overrides ALLOW; a name with no grant at all resolves DENY.
class PolicyEngine {
 public:
  explicit PolicyEngine(std::shared_ptr<store::Store> store,
                        AuditLog* audit = nullptr);

  Result<Permission> grant(const Subject& subject, std::string_view name,
                           Kind kind);
  Result<bool> revoke(const Subject& subject, std::string_view name,
                      Kind kind);

  Result<void> add_inheritance(std::string_view user, std::string_view org);
  Result<bool> remove_inheritance(std::string_view user);
  Result<std::optional<std::string>> parent_org(std::string_view user);

  // ALLOW grant for every catalog name; returns the catalog size.
  Result<int> assign_all(std::string_view user, std::string_view org);

  Result<std::vector<Permission>> effective_permissions(
      std::string_view user);
  Decision check(std::string_view user, std::string_view name);

  // Raw grants of one subject (no inheritance, no precedence).
  Result<std::vector<Permission>> direct_grants(const Subject& subject);
  // Removes every direct grant of the subject; compensation primitive.
  Result<int> revoke_all_direct(const Subject& subject);

  PolicyStats stats() const;
  void reset_stats();

 private:
  Result<std::vector<Permission>> resolve(std::string_view user);
  Result<void> require_subject(const Subject& subject);

  std::shared_ptr<store::Store> store_;
  AuditLog* audit_;
  std::atomic<std::uint64_t> effective_calls_{0};
  std::atomic<std::uint64_t> check_calls_{0};
};

// True if the resolved set carries an ALLOW entry for `name`; the
// default-deny rule in one place.
bool allows(const std::vector<Permission>& effective, std::string_view name);

}  // namespace edgeiam::policy
