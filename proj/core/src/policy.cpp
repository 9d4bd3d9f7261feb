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

#include "edgeiam/policy.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "edgeiam/crypto.hpp"

namespace edgeiam::policy {

using nlohmann::json;

std::string_view kind_name(Kind kind) {
  return kind == Kind::kAllow ? "ALLOW" : "DENY";
}

std::optional<Kind> kind_from(std::string_view name) {
  if (name == "ALLOW") return Kind::kAllow;
  if (name == "DENY") return Kind::kDeny;
  return std::nullopt;
}

const std::vector<std::string>& system_permissions() {
  static const std::vector<std::string> kCatalog = {
      "config.put",       "config.get",        "ns.create",
      "ns.read",          "org.member.add",    "org.member.remove",
      "org.perm.grant",   "org.perm.revoke",
  };
  return kCatalog;
}

bool valid_permission_name(std::string_view name) {
  if (name.empty()) return false;
  bool segment_started = false;
  for (char c : name) {
    if (c == '.') {
      if (!segment_started) return false;  // empty segment
      segment_started = false;
      continue;
    }
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
    segment_started = true;
  }
  return segment_started;  // no trailing dot
}

bool allows(const std::vector<Permission>& effective, std::string_view name) {
  for (const auto& p : effective) {
    if (p.name == name && p.kind == Kind::kAllow) return true;
  }
  return false;
}

namespace {

std::string subject_prefix(const Subject& s) {
  return (s.kind == SubjectKind::kUser ? "u:" : "o:") + s.id + ":";
}

store::StoreKey grant_key(const Subject& s, std::string_view name, Kind kind) {
  return {"grants", subject_prefix(s) + std::string(name) + ":" +
                        std::string(kind_name(kind))};
}

store::StoreKey inherit_key(std::string_view user) {
  return {"inherit", std::string(user)};
}

json grant_to_json(const Subject& s, const Permission& p) {
  return json{{"id", p.id},
              {"name", p.name},
              {"kind", kind_name(p.kind)},
              {"subject_kind", s.kind == SubjectKind::kUser ? "USER" : "ORG"},
              {"subject_id", s.id}};
}

std::optional<Permission> grant_from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  auto kind = kind_from(j.value("kind", ""));
  if (!kind) return std::nullopt;
  return Permission{j.value("id", ""), j.value("name", ""), *kind};
}

}  // namespace

PolicyEngine::PolicyEngine(std::shared_ptr<store::Store> store,
                           AuditLog* audit)
    : store_(std::move(store)), audit_(audit) {}

// Subject existence is read straight from the shared store: the identity
// service writes "users"/"orgs" records there and the engine only needs to
// know they exist.
Result<void> PolicyEngine::require_subject(const Subject& subject) {
  const store::StoreKey key{
      subject.kind == SubjectKind::kUser ? "users" : "orgs", subject.id};
  auto rec = store_->get(key);
  if (!rec) return rec.error();
  if (!rec.value().has_value()) {
    return make_error(Errc::kUnknownSubject,
                      "unknown subject " + subject_prefix(subject));
  }
  return {};
}

Result<Permission> PolicyEngine::grant(const Subject& subject,
                                       std::string_view name, Kind kind) {
  if (!valid_permission_name(name)) {
    return Result<Permission>(make_error(
        Errc::kMalformedName, "malformed permission name " + std::string(name)));
  }
  if (auto exists = require_subject(subject); !exists) {
    return Result<Permission>(exists.error());
  }

  const auto key = grant_key(subject, name, kind);
  auto existing = store_->get(key);
  if (!existing) return Result<Permission>(existing.error());
  if (existing.value().has_value()) {
    auto parsed = grant_from_json(existing.value()->value);
    if (parsed) return *parsed;  // idempotent: same grant, same id
  }

  Permission p{crypto::uuid4(), std::string(name), kind};
  auto put = store_->put(key, grant_to_json(subject, p).dump());
  if (!put) return Result<Permission>(put.error());
  return p;
}

Result<bool> PolicyEngine::revoke(const Subject& subject,
                                  std::string_view name, Kind kind) {
  if (auto exists = require_subject(subject); !exists) {
    return Result<bool>(exists.error());
  }
  return store_->remove(grant_key(subject, name, kind));
}

Result<void> PolicyEngine::add_inheritance(std::string_view user,
                                           std::string_view org) {
  if (auto u = require_subject(Subject::user(user)); !u) return u.error();
  if (auto o = require_subject(Subject::org(org)); !o) return o.error();
  auto existing = store_->get(inherit_key(user));
  if (!existing) return existing.error();
  if (existing.value().has_value()) {
    return make_error(Errc::kAlreadyInherits,
                      std::string(user) + " already inherits from an org");
  }
  json j{{"child", std::string(user)}, {"parent", std::string(org)}};
  auto put = store_->put(inherit_key(user), j.dump());
  if (!put) return put.error();
  return {};
}

Result<bool> PolicyEngine::remove_inheritance(std::string_view user) {
  return store_->remove(inherit_key(user));
}

Result<std::optional<std::string>> PolicyEngine::parent_org(
    std::string_view user) {
  auto rec = store_->get(inherit_key(user));
  if (!rec) return Result<std::optional<std::string>>(rec.error());
  if (!rec.value().has_value()) return std::optional<std::string>{};
  json j = json::parse(rec.value()->value, nullptr, false);
  if (j.is_discarded()) {
    return Result<std::optional<std::string>>(
        make_error(Errc::kStoreIo, "corrupt inheritance record"));
  }
  return std::optional<std::string>(j.value("parent", ""));
}

Result<int> PolicyEngine::assign_all(std::string_view user,
                                     std::string_view org) {
  if (auto u = require_subject(Subject::user(user)); !u) {
    return Result<int>(u.error());
  }
  if (auto o = require_subject(Subject::org(org)); !o) {
    return Result<int>(o.error());
  }
  for (const auto& name : system_permissions()) {
    auto granted = grant(Subject::user(user), name, Kind::kAllow);
    if (!granted) return Result<int>(granted.error());
  }
  return static_cast<int>(system_permissions().size());
}

Result<std::vector<Permission>> PolicyEngine::direct_grants(
    const Subject& subject) {
  auto records = store_->list_prefix("grants", subject_prefix(subject));
  if (!records) return Result<std::vector<Permission>>(records.error());
  std::vector<Permission> out;
  for (const auto& rec : records.value()) {
    if (auto p = grant_from_json(rec.value)) out.push_back(std::move(*p));
  }
  return out;
}

Result<int> PolicyEngine::revoke_all_direct(const Subject& subject) {
  auto records = store_->list_prefix("grants", subject_prefix(subject));
  if (!records) return Result<int>(records.error());
  int removed = 0;
  for (const auto& rec : records.value()) {
    auto r = store_->remove(rec.key);
    if (!r) return Result<int>(r.error());
    if (r.value()) ++removed;
  }
  return removed;
}

// Precedence in one place: direct level shadows inherited level per name,
// DENY beats ALLOW within a level, output sorted by name.
Result<std::vector<Permission>> PolicyEngine::resolve(std::string_view user) {
  if (auto u = require_subject(Subject::user(user)); !u) {
    return Result<std::vector<Permission>>(u.error());
  }
  auto direct = direct_grants(Subject::user(user));
  if (!direct) return direct;

  std::vector<Permission> inherited;
  auto parent = parent_org(user);
  if (!parent) return Result<std::vector<Permission>>(parent.error());
  if (parent.value().has_value()) {
    auto org_grants = direct_grants(Subject::org(*parent.value()));
    if (!org_grants) return org_grants;
    inherited = std::move(org_grants.value());
  }

  struct Slot {
    const Permission* allow = nullptr;
    const Permission* deny = nullptr;
    void add(const Permission& p) {
      (p.kind == Kind::kDeny ? deny : allow) = &p;
    }
    const Permission* winner() const { return deny != nullptr ? deny : allow; }
  };

  std::map<std::string, Slot> direct_by_name;
  for (const auto& p : direct.value()) direct_by_name[p.name].add(p);
  std::map<std::string, Slot> inherited_by_name;
  for (const auto& p : inherited) inherited_by_name[p.name].add(p);

  std::map<std::string, const Permission*> winners;
  for (const auto& [name, slot] : inherited_by_name) {
    winners[name] = slot.winner();
  }
  for (const auto& [name, slot] : direct_by_name) {
    winners[name] = slot.winner();  // direct shadows inherited
  }

  std::vector<Permission> out;
  out.reserve(winners.size());
  for (const auto& [name, p] : winners) {
    out.push_back(*p);
  }
  return out;
}

Result<std::vector<Permission>> PolicyEngine::effective_permissions(
    std::string_view user) {
  effective_calls_.fetch_add(1, std::memory_order_relaxed);
  return resolve(user);
}

Decision PolicyEngine::check(std::string_view user, std::string_view name) {
  check_calls_.fetch_add(1, std::memory_order_relaxed);
  auto effective = resolve(user);
  if (!effective) {
    if (audit_ != nullptr) {
      audit_->append("policy.deny",
                     "unresolvable subject u:" + std::string(user) + " for " +
                         std::string(name));
    }
    return Decision::kDeny;
  }
  return allows(effective.value(), name) ? Decision::kAllow : Decision::kDeny;
}

PolicyStats PolicyEngine::stats() const {
  return {effective_calls_.load(), check_calls_.load()};
}

void PolicyEngine::reset_stats() {
  effective_calls_.store(0);
  check_calls_.store(0);
}

}  // namespace edgeiam::policy
