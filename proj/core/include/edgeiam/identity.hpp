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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "edgeiam/audit.hpp"
#include "edgeiam/clock.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/store.hpp"
#include "edgeiam/vault.hpp"

namespace edgeiam::identity {

enum class Role { kOwner, kMember };

std::string_view role_name(Role role);  // "OWNER" / "MEMBER"

struct RegistrationRequest {
  std::string username;
  std::string password;
  std::map<std::string, std::string> personal_info;
  std::optional<std::string> org_name;  // defaults to the username
};

struct UserRecord {
  std::string username;
  std::map<std::string, std::string> personal_info;
  std::string org;
  Role role = Role::kMember;
  std::int64_t created_at = 0;
};

struct OrganizationRecord {
  std::string name;
  std::string owner;
  std::int64_t created_at = 0;
};

struct OrgView {
  OrganizationRecord org;
  std::vector<std::string> members;  // sorted usernames, owner included
};

struct IdentityConfig {
  // When true, registration returns after the org is stored and the
  // inheritance/grant steps run in the background; a background failure is
  // compensated and audited instead of rolled back end to end.
  bool async_grants = false;
};

// Account and organization management. Registration is a four-step saga
// over stores with no cross-key transactions:
//   (1) vault credentials  (2) org + user records
//   (3) inheritance edge   (4) owner permission grants
// A failure at step k compensates steps k..1 in reverse order with
// idempotent deletes, leaving both stores exactly as before the call.
class IdentityService {
 public:
  IdentityService(std::shared_ptr<store::Store> store,
                  std::shared_ptr<vault::Vault> vault,
                  std::shared_ptr<policy::PolicyEngine> policy,
                  std::shared_ptr<Clock> clock, IdentityConfig config = {},
                  AuditLog* audit = nullptr);
  ~IdentityService();

  Result<UserRecord> register_user(const RegistrationRequest& req);

  // Owner-only; the new member starts with zero direct grants and inherits
  // whatever the organization holds.
  Result<UserRecord> add_member(std::string_view org, std::string_view caller,
                                std::string_view new_username,
                                std::string_view temp_password);

  // Owner-only; removes grants, inheritance, the user record and the vault
  // credential. Live access tokens are not revoked: the next authorization
  // fails anyway because the user record is gone.
  Result<void> remove_member(std::string_view org, std::string_view caller,
                             std::string_view target);

  Result<UserRecord> get_user(std::string_view username);
  Result<OrgView> get_organization(std::string_view name);

  // Blocks until queued async grant work has drained.
  void wait_background();

 private:
  Result<UserRecord> run_registration(const RegistrationRequest& req,
                                      const std::string& org_name);

  std::shared_ptr<store::Store> store_;
  std::shared_ptr<vault::Vault> vault_;
  std::shared_ptr<policy::PolicyEngine> policy_;
  std::shared_ptr<Clock> clock_;
  IdentityConfig config_;
  AuditLog* audit_;
  std::mutex write_mu_;
  std::vector<std::thread> background_;
  std::mutex background_mu_;
};

}  // namespace edgeiam::identity
