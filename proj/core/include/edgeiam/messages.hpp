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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/errors.hpp"

namespace edgeiam {

// Internal headers. The permission token never leaves the service mesh;
// external clients only ever see the access token.
inline constexpr std::string_view kPermissionTokenHeader =
    "X-Permission-Token";
inline constexpr std::string_view kRequestIdHeader = "X-Request-Id";
inline constexpr std::string_view kUsernameHeader = "X-Username";

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string content_type;
  std::vector<std::pair<std::string, std::string>> headers;

  void set_header(std::string_view name, std::string_view value) {
    headers.emplace_back(name, value);
  }
};

// Case-insensitive header lookup; empty string when absent.
std::string find_header(const HttpRequest& req, std::string_view name);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type = "application/json";
};

// The internal hop: what a backend sees after the gateway. The external
// Authorization header survives only on the unauthenticated auth routes,
// where the vault consumes it itself; everywhere else internal trust rides
// exclusively on the permission token.
struct ForwardedRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string content_type;
  std::string permission_token;  // X-Permission-Token
  std::string request_id;        // X-Request-Id
  std::string username_header;   // X-Username (plain-header flow only)
  std::string authorization;     // auth routes only
};

struct BackendResponse {
  int status = 0;
  std::string body;
  std::string content_type = "application/json";
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse handle(const ForwardedRequest& req) = 0;
};

// Transport between gateway and backends. Implementations count sends per
// target so tests can assert which backends a request reached.
class Forwarder {
 public:
  virtual ~Forwarder() = default;
  virtual Result<BackendResponse> send(const std::string& target,
                                       const ForwardedRequest& req) = 0;

  std::uint64_t sent(const std::string& target) const;
  std::uint64_t sent_total() const;
  void reset_counters();

 protected:
  void count(const std::string& target);

 private:
  mutable std::mutex counter_mu_;
  std::map<std::string, std::uint64_t> counters_;
};

class InProcessForwarder final : public Forwarder {
 public:
  void bind(std::string target, std::shared_ptr<Backend> backend);
  Result<BackendResponse> send(const std::string& target,
                               const ForwardedRequest& req) override;

 private:
  std::map<std::string, std::shared_ptr<Backend>> backends_;
};

// JSON error envelope used on every refusal path.
std::string error_body(std::string_view message, std::string_view code,
                       std::string_view request_id);

}  // namespace edgeiam
