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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "edgeiam/errors.hpp"
#include "edgeiam/messages.hpp"
#include "edgeiam/policy.hpp"

namespace edgeiam::gateway {
class Gateway;
}

namespace edgeiam::net {

// Serves one Backend over loopback HTTP, translating the internal headers
// back and forth. This is the local-socket flavor of the internal hop.
class BackendServer {
 public:
  BackendServer(std::shared_ptr<Backend> backend, std::string host);
  ~BackendServer();

  Result<void> start();
  void stop();
  int port() const { return port_; }
  const std::string& host() const { return host_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<Backend> backend_;
  std::string host_;
  int port_ = 0;
};

// Forwarder that reaches targets over HTTP. Connections are pooled per
// thread so concurrent load does not exhaust ephemeral ports.
class HttpForwarder final : public Forwarder {
 public:
  void bind(std::string target, std::string host, int port);
  Result<BackendResponse> send(const std::string& target,
                               const ForwardedRequest& req) override;

 private:
  struct Endpoint {
    std::string host;
    int port = 0;
  };
  std::map<std::string, Endpoint> endpoints_;
};

// External HTTP listener in front of a Gateway.
class GatewayServer {
 public:
  GatewayServer(gateway::Gateway& gw, std::string host, int port);
  ~GatewayServer();

  // Binds and starts serving; with port 0 an ephemeral port is chosen.
  Result<void> start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  gateway::Gateway& gateway_;
  std::string host_;
  int port_;
};

// Decision port for services that authorize via the policy engine rather
// than the permission token.
class PolicyPort {
 public:
  virtual ~PolicyPort() = default;
  virtual policy::Decision check(std::string_view user,
                                 std::string_view name) = 0;
};

class InProcessPolicyPort final : public PolicyPort {
 public:
  explicit InProcessPolicyPort(std::shared_ptr<policy::PolicyEngine> engine)
      : engine_(std::move(engine)) {}
  policy::Decision check(std::string_view user,
                         std::string_view name) override {
    return engine_->check(user, name);
  }

 private:
  std::shared_ptr<policy::PolicyEngine> engine_;
};

// Remote-procedure surface of the policy engine:
//   POST /internal/policy/check  {"user","name"} -> {"decision"}
//   POST /internal/policy/list   {"user"}        -> {"permissions":[...]}
class PolicyServer {
 public:
  PolicyServer(std::shared_ptr<policy::PolicyEngine> engine, std::string host);
  ~PolicyServer();

  Result<void> start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<policy::PolicyEngine> engine_;
  std::string host_;
  int port_ = 0;
};

class HttpPolicyPort final : public PolicyPort {
 public:
  HttpPolicyPort(std::string host, int port)
      : host_(std::move(host)), port_(port) {}
  // Fails closed: any transport or protocol error counts as DENY.
  policy::Decision check(std::string_view user,
                         std::string_view name) override;

 private:
  std::string host_;
  int port_;
};

}  // namespace edgeiam::net
