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
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/errors.hpp"
#include "edgeiam/policy.hpp"

namespace edgeiam::token {

inline constexpr std::int64_t kDefaultPermTtlS = 5;
inline constexpr std::size_t kSigningKeyBytes = 32;

struct SigningKey {
  std::string key_id;
  std::string key_bytes;  // 32 raw bytes, never serialized outward
  std::int64_t created_at = 0;
};

// Short-lived per-request claims: subject plus the effective permission
// set, each permission flattened to "name|KIND|id".
struct PermissionClaims {
  std::string sub;
  std::int64_t iat = 0;
  std::int64_t exp = 0;  // iat + ttl; token valid while now < exp
  std::string jti;       // unique per mint
  std::vector<std::string> permissions;

  bool operator==(const PermissionClaims&) const = default;
};

std::string encode_permission(const policy::Permission& p);
Result<policy::Permission> decode_permission(std::string_view encoded);

PermissionClaims make_claims(std::string_view sub,
                             const std::vector<policy::Permission>& perms,
                             std::int64_t now, std::int64_t ttl_s);

// Compact HS256 JWT: base64url(header).base64url(payload).base64url(sig)
// with header exactly {"alg":"HS256","typ":"JWT"} and alphabetically
// ordered payload fields.
std::string mint(const PermissionClaims& claims, const SigningKey& key);

// Structure, signature (constant-time), then expiry; the error codes stay
// distinct for audit purposes even though callers refuse uniformly.
Result<PermissionClaims> verify(std::string_view jwt, const SigningKey& key,
                                std::int64_t now);

}  // namespace edgeiam::token
