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

#include "edgeiam/backends.hpp"

#include <json.hpp>

namespace edgeiam::backends {

using nlohmann::json;

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) out.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

BackendResponse error_response(int status, std::string_view code,
                               std::string_view message,
                               std::string_view request_id) {
  return BackendResponse{status, error_body(message, code, request_id),
                         "application/json"};
}

namespace {

int status_for(Errc code) {
  switch (code) {
    case Errc::kDuplicateUsername:
    case Errc::kOrganizationExists:
      return 409;
    case Errc::kInvalidUsername:
    case Errc::kWeakPassword:
    case Errc::kMalformedName:
    case Errc::kAlreadyInherits:
    case Errc::kMalformedPermissionString:
    case Errc::kInvalidKey:
      return 400;
    case Errc::kInvalidCredentials:
    case Errc::kTokenInvalid:
    case Errc::kTokenExpired:
    case Errc::kMissingToken:
    case Errc::kMalformedToken:
    case Errc::kBadSignature:
      return 401;
    case Errc::kNotOwner:
    case Errc::kCannotRemoveOwner:
    case Errc::kPermissionDenied:
      return 403;
    case Errc::kNotFound:
    case Errc::kUnknownMember:
    case Errc::kUnknownSubject:
    case Errc::kUnknownKey:
    case Errc::kUnknownRoute:
      return 404;
    default:
      return 500;
  }
}

BackendResponse from_error(const Error& err, std::string_view request_id) {
  return error_response(status_for(err.code), errc_name(err.code), err.message,
                        request_id);
}

json parse_body(const ForwardedRequest& req) {
  return json::parse(req.body, nullptr, false);
}

// Backend-side JWT gate. The gateway already refused unauthorized traffic;
// services still verify the token and the required permission themselves.
std::optional<token::PermissionClaims> authorize(
    const ForwardedRequest& req, const token::SigningKey& key,
    std::int64_t now, std::string_view required_permission,
    BackendResponse* refusal) {
  if (req.permission_token.empty()) {
    *refusal = error_response(401, "missing_permission_token",
                              "permission token required", req.request_id);
    return std::nullopt;
  }
  auto claims = token::verify(req.permission_token, key, now);
  if (!claims) {
    *refusal = from_error(claims.error(), req.request_id);
    return std::nullopt;
  }
  bool allowed = false;
  for (const auto& encoded : claims.value().permissions) {
    auto p = token::decode_permission(encoded);
    if (!p) continue;
    if (p.value().name == required_permission &&
        p.value().kind == policy::Kind::kAllow) {
      allowed = true;
      break;
    }
  }
  if (!allowed) {
    *refusal = error_response(
        403, "permission_denied",
        "token does not allow " + std::string(required_permission),
        req.request_id);
    return std::nullopt;
  }
  return std::move(claims.value());
}

json user_json(const identity::UserRecord& user) {
  return json{{"username", user.username},
              {"org", user.org},
              {"role", identity::role_name(user.role)},
              {"personal_info", user.personal_info},
              {"created_at", user.created_at}};
}

}  // namespace

IdentityBackend::IdentityBackend(
    std::shared_ptr<identity::IdentityService> identity, token::SigningKey key,
    std::shared_ptr<Clock> clock)
    : identity_(std::move(identity)),
      key_(std::move(key)),
      clock_(std::move(clock)) {}

BackendResponse IdentityBackend::handle(const ForwardedRequest& req) {
  const auto parts = split_path(req.path);

  // POST /api/v1/auth/register
  if (req.method == "POST" && parts.size() == 4 && parts[2] == "auth" &&
      parts[3] == "register") {
    json body = parse_body(req);
    if (body.is_discarded() || !body.is_object()) {
      return error_response(400, "bad_request", "body must be a JSON object",
                            req.request_id);
    }
    identity::RegistrationRequest reg;
    reg.username = body.value("username", "");
    reg.password = body.value("password", "");
    if (body.contains("personal_info") && body["personal_info"].is_object()) {
      reg.personal_info =
          body["personal_info"].get<std::map<std::string, std::string>>();
    }
    if (body.contains("org_name") && body["org_name"].is_string()) {
      reg.org_name = body["org_name"].get<std::string>();
    }
    auto user = identity_->register_user(reg);
    if (!user) return from_error(user.error(), req.request_id);
    return BackendResponse{201, user_json(user.value()).dump(),
                           "application/json"};
  }

  // POST /api/v1/orgs/{org}/members
  if (req.method == "POST" && parts.size() == 5 && parts[2] == "orgs" &&
      parts[4] == "members") {
    BackendResponse refusal;
    auto claims =
        authorize(req, key_, clock_->now_s(), "org.member.add", &refusal);
    if (!claims) return refusal;
    json body = parse_body(req);
    if (body.is_discarded() || !body.is_object()) {
      return error_response(400, "bad_request", "body must be a JSON object",
                            req.request_id);
    }
    auto member = identity_->add_member(parts[3], claims->sub,
                                        body.value("username", ""),
                                        body.value("temp_password", ""));
    if (!member) return from_error(member.error(), req.request_id);
    return BackendResponse{201, user_json(member.value()).dump(),
                           "application/json"};
  }

  // DELETE /api/v1/orgs/{org}/members/{username}
  if (req.method == "DELETE" && parts.size() == 6 && parts[2] == "orgs" &&
      parts[4] == "members") {
    BackendResponse refusal;
    auto claims =
        authorize(req, key_, clock_->now_s(), "org.member.remove", &refusal);
    if (!claims) return refusal;
    auto removed = identity_->remove_member(parts[3], claims->sub, parts[5]);
    if (!removed) return from_error(removed.error(), req.request_id);
    return BackendResponse{204, "", "application/json"};
  }

  return error_response(404, "unknown_route",
                        "identity service has no handler for " + req.path,
                        req.request_id);
}

AuthBackend::AuthBackend(std::shared_ptr<vault::Vault> vault)
    : vault_(std::move(vault)) {}

BackendResponse AuthBackend::handle(const ForwardedRequest& req) {
  const auto parts = split_path(req.path);

  // POST /api/v1/auth/login
  if (req.method == "POST" && parts.size() == 4 && parts[3] == "login") {
    json body = parse_body(req);
    if (body.is_discarded() || !body.is_object()) {
      return error_response(400, "bad_request", "body must be a JSON object",
                            req.request_id);
    }
    auto tok = vault_->authenticate(body.value("username", ""),
                                    body.value("password", ""));
    if (!tok) return from_error(tok.error(), req.request_id);
    json out{{"access_token", tok.value().token_value},
             {"expires_at", tok.value().expires_at}};
    return BackendResponse{200, out.dump(), "application/json"};
  }

  // PUT /api/v1/auth/credentials, Bearer resolved by the vault itself.
  if (req.method == "PUT" && parts.size() == 4 && parts[3] == "credentials") {
    if (req.authorization.size() < 8 ||
        req.authorization.compare(0, 7, "Bearer ") != 0) {
      return error_response(401, "missing_token",
                            "Authorization: Bearer required", req.request_id);
    }
    auto info = vault_->verify_token(req.authorization.substr(7));
    if (!info) return from_error(info.error(), req.request_id);
    json body = parse_body(req);
    if (body.is_discarded() || !body.is_object()) {
      return error_response(400, "bad_request", "body must be a JSON object",
                            req.request_id);
    }
    auto updated = vault_->update_password(info.value().subject,
                                           body.value("old_password", ""),
                                           body.value("new_password", ""));
    if (!updated) return from_error(updated.error(), req.request_id);
    return BackendResponse{204, "", "application/json"};
  }

  return error_response(404, "unknown_route",
                        "auth service has no handler for " + req.path,
                        req.request_id);
}

PolicyBackend::PolicyBackend(std::shared_ptr<policy::PolicyEngine> policy,
                             std::shared_ptr<identity::IdentityService> identity,
                             token::SigningKey key,
                             std::shared_ptr<Clock> clock)
    : policy_(std::move(policy)),
      identity_(std::move(identity)),
      key_(std::move(key)),
      clock_(std::move(clock)) {}

BackendResponse PolicyBackend::handle(const ForwardedRequest& req) {
  const auto parts = split_path(req.path);
  if (parts.size() != 5 || parts[2] != "orgs" || parts[4] != "permissions" ||
      (req.method != "POST" && req.method != "DELETE")) {
    return error_response(404, "unknown_route",
                          "policy service has no handler for " + req.path,
                          req.request_id);
  }
  const std::string& org = parts[3];
  const bool granting = req.method == "POST";

  BackendResponse refusal;
  auto claims = authorize(req, key_, clock_->now_s(),
                          granting ? "org.perm.grant" : "org.perm.revoke",
                          &refusal);
  if (!claims) return refusal;

  // Administration stays inside the caller's own organization.
  auto caller = identity_->get_user(claims->sub);
  if (!caller || caller.value().org != org) {
    return error_response(403, "not_owner",
                          "caller does not belong to " + org, req.request_id);
  }

  json body = parse_body(req);
  if (body.is_discarded() || !body.is_object() || !body.contains("subject")) {
    return error_response(400, "bad_request",
                          "body must carry subject, name, kind",
                          req.request_id);
  }
  const json& subj = body["subject"];
  const std::string subj_kind = subj.value("kind", "");
  const std::string subj_id = subj.value("id", "");
  auto kind = policy::kind_from(body.value("kind", ""));
  if ((subj_kind != "USER" && subj_kind != "ORG") || subj_id.empty() ||
      !kind) {
    return error_response(400, "bad_request",
                          "subject.kind must be USER|ORG, kind ALLOW|DENY",
                          req.request_id);
  }

  policy::Subject subject = subj_kind == "USER" ? policy::Subject::user(subj_id)
                                                : policy::Subject::org(subj_id);
  if (subject.kind == policy::SubjectKind::kOrg) {
    if (subject.id != org) {
      return error_response(403, "permission_denied",
                            "subject org outside " + org, req.request_id);
    }
  } else {
    auto target = identity_->get_user(subject.id);
    if (!target || target.value().org != org) {
      return error_response(404, "unknown_member",
                            subject.id + " is not a member of " + org,
                            req.request_id);
    }
  }

  const std::string name = body.value("name", "");
  if (granting) {
    auto granted = policy_->grant(subject, name, *kind);
    if (!granted) return from_error(granted.error(), req.request_id);
    json out{{"id", granted.value().id},
             {"name", granted.value().name},
             {"kind", policy::kind_name(granted.value().kind)}};
    return BackendResponse{201, out.dump(), "application/json"};
  }
  auto revoked = policy_->revoke(subject, name, *kind);
  if (!revoked) return from_error(revoked.error(), req.request_id);
  return BackendResponse{204, "", "application/json"};
}

}  // namespace edgeiam::backends
