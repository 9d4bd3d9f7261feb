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

#include "edgeiam/errors.hpp"

namespace edgeiam {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kOk: return "ok";
    case Errc::kInvalidKey: return "invalid_key";
    case Errc::kStoreIo: return "store_io";
    case Errc::kDuplicateUsername: return "duplicate_username";
    case Errc::kInvalidUsername: return "invalid_username";
    case Errc::kWeakPassword: return "weak_password";
    case Errc::kInvalidCredentials: return "invalid_credentials";
    case Errc::kTokenInvalid: return "invalid_token";
    case Errc::kTokenExpired: return "expired_token";
    case Errc::kUnknownKey: return "unknown_key";
    case Errc::kOrganizationExists: return "organization_exists";
    case Errc::kRegistrationFailed: return "registration_failed";
    case Errc::kRollbackFailed: return "rollback_failed";
    case Errc::kMemberAddFailed: return "member_add_failed";
    case Errc::kNotOwner: return "not_owner";
    case Errc::kCannotRemoveOwner: return "cannot_remove_owner";
    case Errc::kUnknownMember: return "unknown_member";
    case Errc::kNotFound: return "not_found";
    case Errc::kUnknownSubject: return "unknown_subject";
    case Errc::kMalformedName: return "malformed_name";
    case Errc::kAlreadyInherits: return "already_inherits";
    case Errc::kMalformedPermissionString: return "malformed_permission";
    case Errc::kMalformedToken: return "malformed_token";
    case Errc::kBadSignature: return "bad_signature";
    case Errc::kUnknownRoute: return "unknown_route";
    case Errc::kMissingToken: return "missing_token";
    case Errc::kPermissionDenied: return "permission_denied";
    case Errc::kBackendUnavailable: return "backend_unavailable";
    case Errc::kConfigParseError: return "config_parse_error";
    case Errc::kConfigInvalid: return "config_invalid";
    case Errc::kPortInUse: return "port_in_use";
    case Errc::kHarnessSetup: return "harness_setup";
    case Errc::kInternal: return "internal_error";
  }
  return "internal_error";
}

}  // namespace edgeiam
