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

#include "edgeiam/identity.hpp"

#include <functional>

#include <json.hpp>

namespace edgeiam::identity {

using nlohmann::json;

std::string_view role_name(Role role) {
  return role == Role::kOwner ? "OWNER" : "MEMBER";
}

namespace {

store::StoreKey user_key(std::string_view username) {
  return {"users", std::string(username)};
}
store::StoreKey org_key(std::string_view name) {
  return {"orgs", std::string(name)};
}

bool valid_org_name(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

json user_to_json(const UserRecord& u) {
  return json{{"username", u.username},
              {"personal_info", u.personal_info},
              {"org", u.org},
              {"role", role_name(u.role)},
              {"created_at", u.created_at}};
}

std::optional<UserRecord> user_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  UserRecord u;
  u.username = j.value("username", "");
  if (j.contains("personal_info") && j["personal_info"].is_object()) {
    u.personal_info =
        j["personal_info"].get<std::map<std::string, std::string>>();
  }
  u.org = j.value("org", "");
  u.role = j.value("role", "") == "OWNER" ? Role::kOwner : Role::kMember;
  u.created_at = j.value("created_at", std::int64_t{0});
  return u;
}

json org_to_json(const OrganizationRecord& o) {
  return json{{"name", o.name}, {"owner", o.owner}, {"created_at", o.created_at}};
}

std::optional<OrganizationRecord> org_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  OrganizationRecord o;
  o.name = j.value("name", "");
  o.owner = j.value("owner", "");
  o.created_at = j.value("created_at", std::int64_t{0});
  return o;
}

bool passthrough_step1_error(Errc code) {
  return code == Errc::kDuplicateUsername || code == Errc::kInvalidUsername ||
         code == Errc::kWeakPassword;
}

// A saga step: forward action plus idempotent compensation. Compensations
// run for the failed step and every completed one, in reverse order.
struct SagaStep {
  int number;
  std::function<Result<void>()> action;
  std::function<Result<void>()> compensate;
};

}  // namespace

IdentityService::IdentityService(std::shared_ptr<store::Store> store,
                                 std::shared_ptr<vault::Vault> vault,
                                 std::shared_ptr<policy::PolicyEngine> policy,
                                 std::shared_ptr<Clock> clock,
                                 IdentityConfig config, AuditLog* audit)
    : store_(std::move(store)),
      vault_(std::move(vault)),
      policy_(std::move(policy)),
      clock_(std::move(clock)),
      config_(config),
      audit_(audit) {}

IdentityService::~IdentityService() { wait_background(); }

void IdentityService::wait_background() {
  std::vector<std::thread> pending;
  {
    std::lock_guard lock(background_mu_);
    pending.swap(background_);
  }
  for (auto& t : pending) {
    if (t.joinable()) t.join();
  }
}

namespace {

// Runs steps in order; on failure compensates from the failed step back to
// the first. Returns kOk, or the error to surface.
Result<void> run_saga(const std::vector<SagaStep>& steps, Errc wrap_code,
                      AuditLog* audit) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto outcome = steps[i].action();
    if (outcome) continue;

    const int failed_step = steps[i].number;
    if (failed_step == 1 && passthrough_step1_error(outcome.error().code)) {
      return outcome.error();  // nothing written yet
    }
    for (std::size_t k = i + 1; k-- > 0;) {
      auto undone = steps[k].compensate();
      if (!undone) {
        const std::string detail =
            "compensation for step " + std::to_string(steps[k].number) +
            " failed: " + undone.error().message;
        if (audit != nullptr) audit->append("identity.rollback_failed", detail);
        return make_error(Errc::kRollbackFailed, detail, steps[k].number);
      }
    }
    if (audit != nullptr) {
      audit->append("identity.rollback",
                    "step " + std::to_string(failed_step) +
                        " failed, compensated: " + outcome.error().message);
    }
    return make_error(wrap_code,
                      "step " + std::to_string(failed_step) +
                          " failed: " + outcome.error().message,
                      failed_step);
  }
  return {};
}

}  // namespace

Result<UserRecord> IdentityService::register_user(
    const RegistrationRequest& req) {
  const std::string org_name = req.org_name.value_or(req.username);
  if (!valid_org_name(org_name)) {
    return Result<UserRecord>(
        make_error(Errc::kInvalidUsername,
                   "organization name must be [a-z0-9._-]+"));
  }
  std::lock_guard lock(write_mu_);

  auto existing_user = store_->get(user_key(req.username));
  if (!existing_user) return Result<UserRecord>(existing_user.error());
  if (existing_user.value().has_value()) {
    return Result<UserRecord>(make_error(
        Errc::kDuplicateUsername, "username already exists: " + req.username));
  }
  auto existing_org = store_->get(org_key(org_name));
  if (!existing_org) return Result<UserRecord>(existing_org.error());
  if (existing_org.value().has_value()) {
    return Result<UserRecord>(make_error(
        Errc::kOrganizationExists,
        "registering as owner of existing organization is forbidden: " +
            org_name));
  }
  return run_registration(req, org_name);
}

Result<UserRecord> IdentityService::run_registration(
    const RegistrationRequest& req, const std::string& org_name) {
  UserRecord user;
  user.username = req.username;
  user.personal_info = req.personal_info;
  user.org = org_name;
  user.role = Role::kOwner;
  user.created_at = clock_->now_s();

  OrganizationRecord org{org_name, req.username, user.created_at};

  const std::string username = req.username;
  const std::string password = req.password;

  std::vector<SagaStep> steps;
  steps.push_back(SagaStep{
      1,
      [this, username, password]() -> Result<void> {
        auto cred = vault_->register_credentials(username, password);
        if (!cred) return cred.error();
        return {};
      },
      [this, username]() -> Result<void> {
        auto removed = vault_->remove_credentials(username);
        if (!removed) return removed.error();
        return {};
      }});
  steps.push_back(SagaStep{
      2,
      [this, org, user]() -> Result<void> {
        auto org_put = store_->put(org_key(org.name), org_to_json(org).dump());
        if (!org_put) return org_put.error();
        auto user_put =
            store_->put(user_key(user.username), user_to_json(user).dump());
        if (!user_put) return user_put.error();
        return {};
      },
      [this, org, username]() -> Result<void> {
        auto user_rm = store_->remove(user_key(username));
        if (!user_rm) return user_rm.error();
        auto org_rm = store_->remove(org_key(org.name));
        if (!org_rm) return org_rm.error();
        return {};
      }});

  SagaStep inherit_step{
      3,
      [this, username, org_name]() -> Result<void> {
        return policy_->add_inheritance(username, org_name);
      },
      [this, username]() -> Result<void> {
        auto removed = policy_->remove_inheritance(username);
        if (!removed) return removed.error();
        return {};
      }};
  SagaStep grant_step{
      4,
      [this, username, org_name]() -> Result<void> {
        auto count = policy_->assign_all(username, org_name);
        if (!count) return count.error();
        return {};
      },
      [this, username]() -> Result<void> {
        auto removed =
            policy_->revoke_all_direct(policy::Subject::user(username));
        if (!removed) return removed.error();
        return {};
      }};

  if (!config_.async_grants) {
    steps.push_back(std::move(inherit_step));
    steps.push_back(std::move(grant_step));
    auto outcome = run_saga(steps, Errc::kRegistrationFailed, audit_);
    if (!outcome) return Result<UserRecord>(outcome.error());
    return user;
  }

  // Async mode: respond once the durable records exist; inheritance and
  // grants complete in the background, compensated and audited on failure
  // rather than unwinding the whole registration.
  auto outcome = run_saga(steps, Errc::kRegistrationFailed, audit_);
  if (!outcome) return Result<UserRecord>(outcome.error());

  std::vector<SagaStep> background_steps;
  background_steps.push_back(std::move(inherit_step));
  background_steps.push_back(std::move(grant_step));
  {
    std::lock_guard lock(background_mu_);
    background_.emplace_back(
        [this, username, steps = std::move(background_steps)]() {
          for (std::size_t i = 0; i < steps.size(); ++i) {
            auto step_outcome = steps[i].action();
            if (step_outcome) continue;
            for (std::size_t k = i + 1; k-- > 0;) {
              (void)steps[k].compensate();
            }
            if (audit_ != nullptr) {
              audit_->append(
                  "identity.async_grants_failed",
                  "user " + username + ": step " +
                      std::to_string(steps[i].number) +
                      " failed: " + step_outcome.error().message);
            }
            return;
          }
        });
  }
  return user;
}

Result<UserRecord> IdentityService::add_member(std::string_view org,
                                               std::string_view caller,
                                               std::string_view new_username,
                                               std::string_view temp_password) {
  std::lock_guard lock(write_mu_);

  auto caller_rec = get_user(caller);
  if (!caller_rec || caller_rec.value().org != org ||
      caller_rec.value().role != Role::kOwner) {
    return Result<UserRecord>(make_error(
        Errc::kNotOwner, "caller is not the owner of " + std::string(org)));
  }
  auto existing = store_->get(user_key(new_username));
  if (!existing) return Result<UserRecord>(existing.error());
  if (existing.value().has_value()) {
    return Result<UserRecord>(
        make_error(Errc::kDuplicateUsername,
                   "username already exists: " + std::string(new_username)));
  }

  UserRecord member;
  member.username = std::string(new_username);
  member.org = std::string(org);
  member.role = Role::kMember;
  member.created_at = clock_->now_s();

  const std::string username = member.username;
  const std::string password(temp_password);
  const std::string org_name(org);

  std::vector<SagaStep> steps;
  steps.push_back(SagaStep{
      1,
      [this, username, password]() -> Result<void> {
        auto cred = vault_->register_credentials(username, password);
        if (!cred) return cred.error();
        return {};
      },
      [this, username]() -> Result<void> {
        auto removed = vault_->remove_credentials(username);
        if (!removed) return removed.error();
        return {};
      }});
  steps.push_back(SagaStep{
      2,
      [this, member]() -> Result<void> {
        auto put =
            store_->put(user_key(member.username), user_to_json(member).dump());
        if (!put) return put.error();
        return {};
      },
      [this, username]() -> Result<void> {
        auto removed = store_->remove(user_key(username));
        if (!removed) return removed.error();
        return {};
      }});
  steps.push_back(SagaStep{
      3,
      [this, username, org_name]() -> Result<void> {
        return policy_->add_inheritance(username, org_name);
      },
      [this, username]() -> Result<void> {
        auto removed = policy_->remove_inheritance(username);
        if (!removed) return removed.error();
        return {};
      }});
  // Deliberately no step 4: members start with zero direct grants.

  auto outcome = run_saga(steps, Errc::kMemberAddFailed, audit_);
  if (!outcome) return Result<UserRecord>(outcome.error());
  return member;
}

Result<void> IdentityService::remove_member(std::string_view org,
                                            std::string_view caller,
                                            std::string_view target) {
  std::lock_guard lock(write_mu_);

  auto caller_rec = get_user(caller);
  if (!caller_rec || caller_rec.value().org != org ||
      caller_rec.value().role != Role::kOwner) {
    return make_error(Errc::kNotOwner,
                      "caller is not the owner of " + std::string(org));
  }
  auto target_rec = get_user(target);
  if (!target_rec || target_rec.value().org != org) {
    return make_error(Errc::kUnknownMember,
                      std::string(target) + " is not a member of " +
                          std::string(org));
  }
  if (target_rec.value().role == Role::kOwner) {
    return make_error(Errc::kCannotRemoveOwner,
                      "an organization keeps exactly one owner");
  }

  // Grants first, the user record last: authorization dies before the
  // identity does, never the other way around.
  auto grants = policy_->revoke_all_direct(policy::Subject::user(target));
  if (!grants) return grants.error();
  auto inherit = policy_->remove_inheritance(target);
  if (!inherit) return inherit.error();
  auto user_rm = store_->remove(user_key(target));
  if (!user_rm) return user_rm.error();
  auto cred_rm = vault_->remove_credentials(target);
  if (!cred_rm) return cred_rm.error();
  return {};
}

Result<UserRecord> IdentityService::get_user(std::string_view username) {
  auto rec = store_->get(user_key(username));
  if (!rec) return Result<UserRecord>(rec.error());
  if (!rec.value().has_value()) {
    return Result<UserRecord>(
        make_error(Errc::kNotFound, "no such user: " + std::string(username)));
  }
  auto parsed = user_from_json(rec.value()->value);
  if (!parsed) {
    return Result<UserRecord>(make_error(Errc::kStoreIo, "corrupt user record"));
  }
  return *parsed;
}

Result<OrgView> IdentityService::get_organization(std::string_view name) {
  auto rec = store_->get(org_key(name));
  if (!rec) return Result<OrgView>(rec.error());
  if (!rec.value().has_value()) {
    return Result<OrgView>(make_error(
        Errc::kNotFound, "no such organization: " + std::string(name)));
  }
  auto parsed = org_from_json(rec.value()->value);
  if (!parsed) {
    return Result<OrgView>(make_error(Errc::kStoreIo, "corrupt org record"));
  }

  OrgView view;
  view.org = *parsed;
  auto users = store_->list_prefix("users", "");
  if (!users) return Result<OrgView>(users.error());
  for (const auto& u : users.value()) {
    auto user = user_from_json(u.value);
    if (user && user->org == name) view.members.push_back(user->username);
  }
  return view;
}

}  // namespace edgeiam::identity
