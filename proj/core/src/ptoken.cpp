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

#include "edgeiam/ptoken.hpp"

#include <json.hpp>

#include "edgeiam/crypto.hpp"

namespace edgeiam::token {

using nlohmann::json;

namespace {

constexpr char kDelimiter = '|';

Error malformed(std::string_view why) {
  return make_error(Errc::kMalformedToken, "malformed token: " + std::string(why));
}

std::string sign(std::string_view signing_input, const SigningKey& key) {
  return crypto::base64url_encode(
      crypto::hmac_sha256(key.key_bytes, signing_input));
}

}  // namespace

std::string encode_permission(const policy::Permission& p) {
  std::string out;
  out.reserve(p.name.size() + p.id.size() + 8);
  out += p.name;
  out += kDelimiter;
  out += policy::kind_name(p.kind);
  out += kDelimiter;
  out += p.id;
  return out;
}

Result<policy::Permission> decode_permission(std::string_view encoded) {
  const auto first = encoded.find(kDelimiter);
  if (first == std::string_view::npos) {
    return Result<policy::Permission>(make_error(
        Errc::kMalformedPermissionString, "expected two delimiters"));
  }
  const auto second = encoded.find(kDelimiter, first + 1);
  if (second == std::string_view::npos ||
      encoded.find(kDelimiter, second + 1) != std::string_view::npos) {
    return Result<policy::Permission>(make_error(
        Errc::kMalformedPermissionString, "expected exactly two delimiters"));
  }
  const std::string_view name = encoded.substr(0, first);
  const std::string_view kind = encoded.substr(first + 1, second - first - 1);
  const std::string_view id = encoded.substr(second + 1);
  if (name.empty() || id.empty()) {
    return Result<policy::Permission>(
        make_error(Errc::kMalformedPermissionString, "empty field"));
  }
  const auto parsed_kind = policy::kind_from(kind);
  if (!parsed_kind) {
    return Result<policy::Permission>(make_error(
        Errc::kMalformedPermissionString,
        "permission kind must be ALLOW or DENY, got " + std::string(kind)));
  }
  return policy::Permission{std::string(id), std::string(name), *parsed_kind};
}

PermissionClaims make_claims(std::string_view sub,
                             const std::vector<policy::Permission>& perms,
                             std::int64_t now, std::int64_t ttl_s) {
  PermissionClaims claims;
  claims.sub = std::string(sub);
  claims.iat = now;
  claims.exp = now + ttl_s;
  claims.jti = crypto::uuid4();
  claims.permissions.reserve(perms.size());
  for (const auto& p : perms) {
    claims.permissions.push_back(encode_permission(p));
  }
  return claims;
}

std::string mint(const PermissionClaims& claims, const SigningKey& key) {
  // nlohmann keeps object keys sorted, which pins the byte layout.
  const json header{{"alg", "HS256"}, {"typ", "JWT"}};
  const json payload{{"sub", claims.sub},
                     {"iat", claims.iat},
                     {"exp", claims.exp},
                     {"jti", claims.jti},
                     {"permissions", claims.permissions}};
  std::string signing_input = crypto::base64url_encode(header.dump());
  signing_input += '.';
  signing_input += crypto::base64url_encode(payload.dump());
  const std::string signature = sign(signing_input, key);
  return signing_input + "." + signature;
}

Result<PermissionClaims> verify(std::string_view jwt, const SigningKey& key,
                                std::int64_t now) {
  const auto dot1 = jwt.find('.');
  if (dot1 == std::string_view::npos) {
    return Result<PermissionClaims>(malformed("expected three segments"));
  }
  const auto dot2 = jwt.find('.', dot1 + 1);
  if (dot2 == std::string_view::npos ||
      jwt.find('.', dot2 + 1) != std::string_view::npos) {
    return Result<PermissionClaims>(malformed("expected three segments"));
  }
  const std::string_view header_b64 = jwt.substr(0, dot1);
  const std::string_view payload_b64 = jwt.substr(dot1 + 1, dot2 - dot1 - 1);
  const std::string_view signature_b64 = jwt.substr(dot2 + 1);
  if (header_b64.empty() || payload_b64.empty() || signature_b64.empty()) {
    return Result<PermissionClaims>(malformed("empty segment"));
  }

  const auto header_bytes = crypto::base64url_decode(header_b64);
  if (!header_bytes) {
    return Result<PermissionClaims>(malformed("header is not base64url"));
  }
  const json header = json::parse(*header_bytes, nullptr, false);
  if (header.is_discarded() || header.value("alg", "") != "HS256" ||
      header.value("typ", "") != "JWT") {
    return Result<PermissionClaims>(malformed("unexpected header"));
  }

  // Compare encoded signatures so every byte of the token is load-bearing.
  const std::string expected =
      sign(jwt.substr(0, dot2), key);
  if (!crypto::constant_time_equal(expected, signature_b64)) {
    return Result<PermissionClaims>(
        make_error(Errc::kBadSignature, "signature mismatch"));
  }

  const auto payload_bytes = crypto::base64url_decode(payload_b64);
  if (!payload_bytes) {
    return Result<PermissionClaims>(malformed("payload is not base64url"));
  }
  const json payload = json::parse(*payload_bytes, nullptr, false);
  if (payload.is_discarded() || !payload.contains("sub") ||
      !payload.contains("iat") || !payload.contains("exp") ||
      !payload.contains("jti") || !payload.contains("permissions") ||
      !payload["permissions"].is_array()) {
    return Result<PermissionClaims>(malformed("payload shape"));
  }

  PermissionClaims claims;
  claims.sub = payload["sub"].get<std::string>();
  claims.iat = payload["iat"].get<std::int64_t>();
  claims.exp = payload["exp"].get<std::int64_t>();
  claims.jti = payload["jti"].get<std::string>();
  for (const auto& p : payload["permissions"]) {
    if (!p.is_string()) {
      return Result<PermissionClaims>(malformed("permission entry"));
    }
    claims.permissions.push_back(p.get<std::string>());
  }

  if (now >= claims.exp) {
    return Result<PermissionClaims>(
        make_error(Errc::kTokenExpired, "permission token expired"));
  }
  return claims;
}

}  // namespace edgeiam::token
