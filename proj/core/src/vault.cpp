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

#include "edgeiam/vault.hpp"

#include <json.hpp>

namespace edgeiam::vault {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxUsernameLen = 64;
constexpr std::size_t kMinPasswordLen = 8;
constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kTokenBytes = 32;

bool valid_username(std::string_view username) {
  if (username.empty() || username.size() > kMaxUsernameLen) return false;
  for (char c : username) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

Error invalid_credentials() {
  // One error for unknown user and wrong password alike.
  return make_error(Errc::kInvalidCredentials, "invalid credentials");
}

store::StoreKey cred_key(std::string_view username) {
  return {"users", std::string(username)};
}
store::StoreKey token_key(std::string_view value) {
  return {"tokens", std::string(value)};
}
store::StoreKey signing_key_key(std::string_view id) {
  return {"keys", std::string(id)};
}

json credential_to_json(const CredentialRecord& rec) {
  return json{{"username", rec.username},
              {"digest", rec.digest_hex},
              {"salt", rec.salt_hex},
              {"scrypt_n", rec.kdf.n},
              {"scrypt_r", rec.kdf.r},
              {"scrypt_p", rec.kdf.p},
              {"created_at", rec.created_at}};
}

CredentialRecord credential_from_json(const json& j) {
  CredentialRecord rec;
  rec.username = j.at("username").get<std::string>();
  rec.digest_hex = j.at("digest").get<std::string>();
  rec.salt_hex = j.at("salt").get<std::string>();
  rec.kdf.n = j.at("scrypt_n").get<std::uint64_t>();
  rec.kdf.r = j.at("scrypt_r").get<std::uint32_t>();
  rec.kdf.p = j.at("scrypt_p").get<std::uint32_t>();
  rec.created_at = j.at("created_at").get<std::int64_t>();
  return rec;
}

}  // namespace

Vault::Vault(std::shared_ptr<store::Store> store, std::shared_ptr<Clock> clock,
             VaultConfig config)
    : store_(std::move(store)), clock_(std::move(clock)), config_(config) {}

Result<CredentialRecord> Vault::register_credentials(
    std::string_view username, std::string_view password) {
  if (!valid_username(username)) {
    return Result<CredentialRecord>(make_error(
        Errc::kInvalidUsername,
        "username must be [a-z0-9._-]+, at most 64 chars"));
  }
  if (password.size() < kMinPasswordLen) {
    return Result<CredentialRecord>(
        make_error(Errc::kWeakPassword, "password must be at least 8 chars"));
  }

  std::lock_guard lock(write_mu_);
  auto existing = store_->get(cred_key(username));
  if (!existing) return Result<CredentialRecord>(existing.error());
  if (existing.value().has_value()) {
    return Result<CredentialRecord>(
        make_error(Errc::kDuplicateUsername,
                   "username already registered: " + std::string(username)));
  }

  CredentialRecord rec;
  rec.username = std::string(username);
  const std::string salt = crypto::random_bytes(kSaltBytes);
  rec.salt_hex = crypto::to_hex(salt);
  rec.digest_hex = crypto::to_hex(crypto::scrypt(password, salt, config_.kdf));
  rec.kdf = config_.kdf;
  rec.created_at = clock_->now_s();

  auto put = store_->put(cred_key(username), credential_to_json(rec).dump());
  if (!put) return Result<CredentialRecord>(put.error());
  return rec;
}

Result<CredentialRecord> Vault::load_credentials(std::string_view username) {
  auto rec = store_->get(cred_key(username));
  if (!rec) return Result<CredentialRecord>(rec.error());
  if (!rec.value().has_value()) {
    return Result<CredentialRecord>(invalid_credentials());
  }
  json j = json::parse(rec.value()->value, nullptr, false);
  if (j.is_discarded()) {
    return Result<CredentialRecord>(
        make_error(Errc::kStoreIo, "corrupt credential record"));
  }
  return credential_from_json(j);
}

Result<AccessToken> Vault::authenticate(std::string_view username,
                                        std::string_view password) {
  auto cred = load_credentials(username);
  if (!cred) {
    // Burn a hash on unknown users too, so the timing does not differ.
    if (cred.error().code == Errc::kInvalidCredentials) {
      crypto::scrypt(password, std::string(kSaltBytes, '\0'), config_.kdf);
      return Result<AccessToken>(invalid_credentials());
    }
    return Result<AccessToken>(cred.error());
  }
  const auto salt = crypto::from_hex(cred.value().salt_hex);
  if (!salt) {
    return Result<AccessToken>(
        make_error(Errc::kStoreIo, "corrupt credential salt"));
  }
  const std::string digest =
      crypto::to_hex(crypto::scrypt(password, *salt, cred.value().kdf));
  if (!crypto::constant_time_equal(digest, cred.value().digest_hex)) {
    return Result<AccessToken>(invalid_credentials());
  }

  AccessToken tok;
  tok.token_value = crypto::base64url_encode(crypto::random_bytes(kTokenBytes));
  tok.subject = std::string(username);
  tok.issued_at = clock_->now_s();
  tok.expires_at = tok.issued_at + config_.access_ttl_s;

  json j{{"token_value", tok.token_value},
         {"subject", tok.subject},
         {"issued_at", tok.issued_at},
         {"expires_at", tok.expires_at}};
  auto put = store_->put(token_key(tok.token_value), j.dump());
  if (!put) return Result<AccessToken>(put.error());
  return tok;
}

Result<TokenInfo> Vault::verify_token(std::string_view token_value) {
  auto rec = store_->get(token_key(token_value));
  if (!rec) return Result<TokenInfo>(rec.error());
  if (!rec.value().has_value()) {
    return Result<TokenInfo>(make_error(Errc::kTokenInvalid, "unknown token"));
  }
  json j = json::parse(rec.value()->value, nullptr, false);
  if (j.is_discarded()) {
    return Result<TokenInfo>(make_error(Errc::kStoreIo, "corrupt token record"));
  }
  TokenInfo info{j.at("subject").get<std::string>(),
                 j.at("expires_at").get<std::int64_t>()};
  if (clock_->now_s() >= info.expires_at) {
    return Result<TokenInfo>(make_error(Errc::kTokenExpired, "token expired"));
  }
  return info;
}

Result<void> Vault::update_password(std::string_view username,
                                    std::string_view old_password,
                                    std::string_view new_password) {
  if (new_password.size() < kMinPasswordLen) {
    return make_error(Errc::kWeakPassword, "password must be at least 8 chars");
  }
  std::lock_guard lock(write_mu_);
  auto cred = load_credentials(username);
  if (!cred) return cred.error();
  const auto salt = crypto::from_hex(cred.value().salt_hex);
  if (!salt) return make_error(Errc::kStoreIo, "corrupt credential salt");
  const std::string digest =
      crypto::to_hex(crypto::scrypt(old_password, *salt, cred.value().kdf));
  if (!crypto::constant_time_equal(digest, cred.value().digest_hex)) {
    return invalid_credentials();
  }

  CredentialRecord updated = cred.value();
  const std::string new_salt = crypto::random_bytes(kSaltBytes);
  updated.salt_hex = crypto::to_hex(new_salt);
  updated.digest_hex =
      crypto::to_hex(crypto::scrypt(new_password, new_salt, config_.kdf));
  updated.kdf = config_.kdf;
  auto put =
      store_->put(cred_key(username), credential_to_json(updated).dump());
  if (!put) return put.error();
  return {};
}

Result<std::string> Vault::create_signing_key() {
  token::SigningKey key;
  key.key_id = crypto::uuid4();
  key.key_bytes = crypto::random_bytes(token::kSigningKeyBytes);
  key.created_at = clock_->now_s();
  json j{{"key_id", key.key_id},
         {"key", crypto::base64url_encode(key.key_bytes)},
         {"created_at", key.created_at}};
  auto put = store_->put(signing_key_key(key.key_id), j.dump());
  if (!put) return Result<std::string>(put.error());
  return key.key_id;
}

Result<token::SigningKey> Vault::get_signing_key(std::string_view key_id) {
  auto rec = store_->get(signing_key_key(key_id));
  if (!rec) return Result<token::SigningKey>(rec.error());
  if (!rec.value().has_value()) {
    return Result<token::SigningKey>(
        make_error(Errc::kUnknownKey, "unknown signing key"));
  }
  json j = json::parse(rec.value()->value, nullptr, false);
  if (j.is_discarded()) {
    return Result<token::SigningKey>(
        make_error(Errc::kStoreIo, "corrupt key record"));
  }
  token::SigningKey key;
  key.key_id = j.at("key_id").get<std::string>();
  const auto bytes = crypto::base64url_decode(j.at("key").get<std::string>());
  if (!bytes || bytes->size() != token::kSigningKeyBytes) {
    return Result<token::SigningKey>(
        make_error(Errc::kStoreIo, "corrupt key material"));
  }
  key.key_bytes = *bytes;
  key.created_at = j.at("created_at").get<std::int64_t>();
  return key;
}

Result<token::SigningKey> Vault::active_signing_key() {
  std::lock_guard lock(write_mu_);
  auto pointer = store_->get(signing_key_key("active"));
  if (!pointer) return Result<token::SigningKey>(pointer.error());
  if (pointer.value().has_value()) {
    json j = json::parse(pointer.value()->value, nullptr, false);
    if (!j.is_discarded() && j.contains("key_id")) {
      auto key = get_signing_key(j["key_id"].get<std::string>());
      if (key) return key;
    }
  }
  auto created = create_signing_key();
  if (!created) return Result<token::SigningKey>(created.error());
  json j{{"key_id", created.value()}};
  auto put = store_->put(signing_key_key("active"), j.dump());
  if (!put) return Result<token::SigningKey>(put.error());
  return get_signing_key(created.value());
}

Result<bool> Vault::remove_credentials(std::string_view username) {
  std::lock_guard lock(write_mu_);
  return store_->remove(cred_key(username));
}

}  // namespace edgeiam::vault
