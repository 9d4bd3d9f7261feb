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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/clock.hpp"
#include "edgeiam/identity.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/vault.hpp"

namespace edgeiam::backends {

// Service adapters: translate the forwarded wire requests into service
// calls. Each authenticated adapter re-verifies the permission JWT and
// re-checks the required permission before acting (the gateway already
// decided once; backends do not take that on faith).

// POST /api/v1/auth/register
// POST /api/v1/orgs/{org}/members, DELETE /api/v1/orgs/{org}/members/{user}
class IdentityBackend final : public Backend {
 public:
  IdentityBackend(std::shared_ptr<identity::IdentityService> identity,
                  token::SigningKey key, std::shared_ptr<Clock> clock);
  BackendResponse handle(const ForwardedRequest& req) override;

 private:
  std::shared_ptr<identity::IdentityService> identity_;
  token::SigningKey key_;
  std::shared_ptr<Clock> clock_;
};

// POST /api/v1/auth/login, PUT /api/v1/auth/credentials
// Credentials update resolves the caller from the Bearer token itself:
// authentication is the trusted third party's own business.
class AuthBackend final : public Backend {
 public:
  explicit AuthBackend(std::shared_ptr<vault::Vault> vault);
  BackendResponse handle(const ForwardedRequest& req) override;

 private:
  std::shared_ptr<vault::Vault> vault_;
};

// POST/DELETE /api/v1/orgs/{org}/permissions. Grant subjects are scoped to
// the org in the path, and the caller must belong to that org.
class PolicyBackend final : public Backend {
 public:
  PolicyBackend(std::shared_ptr<policy::PolicyEngine> policy,
                std::shared_ptr<identity::IdentityService> identity,
                token::SigningKey key, std::shared_ptr<Clock> clock);
  BackendResponse handle(const ForwardedRequest& req) override;

 private:
  std::shared_ptr<policy::PolicyEngine> policy_;
  std::shared_ptr<identity::IdentityService> identity_;
  token::SigningKey key_;
  std::shared_ptr<Clock> clock_;
};

// Splits a path on '/'; no decoding beyond that.
std::vector<std::string> split_path(std::string_view path);

BackendResponse error_response(int status, std::string_view code,
                               std::string_view message,
                               std::string_view request_id);

}  // namespace edgeiam::backends
