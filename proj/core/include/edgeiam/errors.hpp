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

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace edgeiam {

enum class Errc {
  kOk = 0,

  // store
  kInvalidKey,
  kStoreIo,

  // vault
  kDuplicateUsername,
  kInvalidUsername,
  kWeakPassword,
  kInvalidCredentials,
  kTokenInvalid,
  kTokenExpired,
  kUnknownKey,

  // identity
  kOrganizationExists,
  kRegistrationFailed,
  kRollbackFailed,
  kMemberAddFailed,
  kNotOwner,
  kCannotRemoveOwner,
  kUnknownMember,
  kNotFound,

  // policy
  kUnknownSubject,
  kMalformedName,
  kAlreadyInherits,

  // permission tokens
  kMalformedPermissionString,
  kMalformedToken,
  kBadSignature,

  // gateway / app
  kUnknownRoute,
  kMissingToken,
  kPermissionDenied,
  kBackendUnavailable,
  kConfigParseError,
  kConfigInvalid,
  kPortInUse,
  kHarnessSetup,
  kInternal,
};

std::string_view errc_name(Errc code);

// Error payload carried by a failed Result. `step` is only meaningful for
// the multi-step registration errors (kRegistrationFailed, kRollbackFailed,
// kMemberAddFailed) and names the step that failed.
struct Error {
  Errc code = Errc::kInternal;
  std::string message;
  int step = 0;
};

inline Error make_error(Errc code, std::string message, int step = 0) {
  return Error{code, std::move(message), step};
}

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : state_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<0>(state_);
  }
  T& value() & {
    assert(ok());
    return std::get<0>(state_);
  }
  T&& value() && {
    assert(ok());
    return std::get<0>(std::move(state_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<1>(state_);
  }
  Errc code() const { return ok() ? Errc::kOk : error().code; }

 private:
  std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::in_place, std::move(error)) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }

  const Error& error() const {
    assert(!ok());
    return *error_;
  }
  Errc code() const { return ok() ? Errc::kOk : error_->code; }

 private:
  std::optional<Error> error_;
};

}  // namespace edgeiam
