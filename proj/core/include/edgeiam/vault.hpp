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
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "edgeiam/clock.hpp"
#include "edgeiam/crypto.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/ptoken.hpp"
#include "edgeiam/store.hpp"

namespace edgeiam::vault {

struct CredentialRecord {
  std::string username;
  std::string digest_hex;  // scrypt output, never the plaintext
  std::string salt_hex;    // 16 random bytes
  crypto::ScryptParams kdf;
  std::int64_t created_at = 0;
};

// Opaque, multi-use, non-renewable login credential. Verified by lookup;
// nothing in the API can extend expires_at.
struct AccessToken {
  std::string token_value;  // 32 random bytes, base64url (43 chars)
  std::string subject;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;  // issued_at + access_ttl
};

struct TokenInfo {
  std::string subject;
  std::int64_t expires_at = 0;
};

struct VaultConfig {
  std::int64_t access_ttl_s = 3600;
  crypto::ScryptParams kdf;
};

// Trusted third-party simulation: the only place passwords live, issuer
// and validator of access tokens, custodian of symmetric signing keys.
// Backed by its own private store instance ("users", "tokens", "keys"),
// distinct from the store shared by identity and policy.
class Vault {
 public:
  Vault(std::shared_ptr<store::Store> store, std::shared_ptr<Clock> clock,
        VaultConfig config = {});

  // Accepts only username + password; username must be unique, lowercase
  // [a-z0-9._-]+, at most 64 chars; password at least 8 chars.
  Result<CredentialRecord> register_credentials(std::string_view username,
                                                std::string_view password);

  Result<AccessToken> authenticate(std::string_view username,
                                   std::string_view password);

  // kTokenInvalid for unknown values, kTokenExpired once now >= expires_at.
  Result<TokenInfo> verify_token(std::string_view token_value);

  // Live access tokens stay valid until natural expiry.
  Result<void> update_password(std::string_view username,
                               std::string_view old_password,
                               std::string_view new_password);

  Result<std::string> create_signing_key();
  Result<token::SigningKey> get_signing_key(std::string_view key_id);
  // Stable key for the deployment: reuses the persisted one or creates it.
  Result<token::SigningKey> active_signing_key();

  // Compensation/removal primitive used by the identity sagas.
  Result<bool> remove_credentials(std::string_view username);

  const VaultConfig& config() const { return config_; }

 private:
  Result<CredentialRecord> load_credentials(std::string_view username);

  std::shared_ptr<store::Store> store_;
  std::shared_ptr<Clock> clock_;
  VaultConfig config_;
  std::mutex write_mu_;  // makes uniqueness checks atomic with inserts
};

}  // namespace edgeiam::vault
