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

#include "edgeiam/net.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "edgeiam/gateway.hpp"

namespace edgeiam::net {

using nlohmann::json;

namespace {

// A keep-alive connection pins one worker thread in httplib's model, and
// connections fan out along the chain, so the pool must outnumber the
// plausible connection count by a wide margin.
constexpr int kServerThreads = 64;

// One persistent client per (thread, endpoint); worker threads reuse
// connections instead of churning through ephemeral ports.
httplib::Client& client_for(const std::string& host, int port) {
  thread_local std::map<std::string, std::unique_ptr<httplib::Client>> clients;
  const std::string key = host + ":" + std::to_string(port);
  auto it = clients.find(key);
  if (it == clients.end()) {
    auto cli = std::make_unique<httplib::Client>(host, port);
    cli->set_connection_timeout(5, 0);
    cli->set_read_timeout(30, 0);
    cli->set_keep_alive(true);
    cli->set_tcp_nodelay(true);
    it = clients.emplace(key, std::move(cli)).first;
  }
  return *it->second;
}

httplib::Result dispatch_once(httplib::Client& cli, const std::string& method,
                              const std::string& path,
                              const httplib::Headers& headers,
                              const std::string& body,
                              const std::string& content_type) {
  const std::string ct =
      content_type.empty() ? "application/json" : content_type;
  if (method == "GET") return cli.Get(path, headers);
  if (method == "POST") return cli.Post(path, headers, body, ct);
  if (method == "PUT") return cli.Put(path, headers, body, ct);
  if (method == "DELETE") return cli.Delete(path, headers, body, ct);
  if (method == "PATCH") return cli.Patch(path, headers, body, ct);
  return cli.Get(path, headers);
}

bool connection_level_error(httplib::Error err) {
  return err == httplib::Error::Connection || err == httplib::Error::Read ||
         err == httplib::Error::Write;
}

// Pooled connections can lose the race with a server-side idle close; one
// retry over a fresh connection is part of speaking keep-alive.
httplib::Result dispatch(httplib::Client& cli, const std::string& method,
                         const std::string& path,
                         const httplib::Headers& headers,
                         const std::string& body,
                         const std::string& content_type) {
  auto result = dispatch_once(cli, method, path, headers, body, content_type);
  if (!result && connection_level_error(result.error())) {
    cli.stop();
    return dispatch_once(cli, method, path, headers, body, content_type);
  }
  return result;
}

ForwardedRequest forwarded_from(const httplib::Request& req) {
  ForwardedRequest fwd;
  fwd.method = req.method;
  fwd.path = req.path;
  fwd.body = req.body;
  fwd.content_type = req.get_header_value("Content-Type");
  fwd.permission_token =
      req.get_header_value(std::string(kPermissionTokenHeader));
  fwd.request_id = req.get_header_value(std::string(kRequestIdHeader));
  fwd.username_header =
      req.get_header_value(std::string(kUsernameHeader));
  fwd.authorization = req.get_header_value("Authorization");
  return fwd;
}

httplib::Headers headers_from(const ForwardedRequest& req) {
  httplib::Headers headers;
  if (!req.permission_token.empty()) {
    headers.emplace(std::string(kPermissionTokenHeader), req.permission_token);
  }
  if (!req.request_id.empty()) {
    headers.emplace(std::string(kRequestIdHeader), req.request_id);
  }
  if (!req.username_header.empty()) {
    headers.emplace(std::string(kUsernameHeader), req.username_header);
  }
  if (!req.authorization.empty()) {
    headers.emplace("Authorization", req.authorization);
  }
  return headers;
}

// Bind (ephemeral when port == 0), then serve on a background thread.
struct ServerRunner {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  ServerRunner() {
    server.new_task_queue = [] { return new httplib::ThreadPool(kServerThreads); };
    server.set_tcp_nodelay(true);
    // Do not recycle healthy connections: the default 5-request cap forces
    // reconnect races under load. Idle ones go quickly so stop() does not
    // wait on pinned worker threads.
    server.set_keep_alive_max_count(1 << 20);
    server.set_keep_alive_timeout(1);
    // SO_REUSEADDR only: an actively held port must refuse a second bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                 reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
  }

  Result<void> start(const std::string& host, int requested_port) {
    if (requested_port == 0) {
      port = server.bind_to_any_port(host);
      if (port <= 0) {
        return make_error(Errc::kPortInUse, "cannot bind to " + host);
      }
    } else {
      if (!server.bind_to_port(host, requested_port)) {
        return make_error(Errc::kPortInUse,
                          "cannot bind to " + host + ":" +
                              std::to_string(requested_port));
      }
      port = requested_port;
    }
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
    return {};
  }

  void stop() {
    if (thread.joinable()) {
      server.stop();
      thread.join();
    }
  }

  ~ServerRunner() { stop(); }
};

}  // namespace

// ---------------------------------------------------------------------------
// BackendServer

struct BackendServer::Impl {
  ServerRunner runner;
};

BackendServer::BackendServer(std::shared_ptr<Backend> backend, std::string host)
    : impl_(std::make_unique<Impl>()),
      backend_(std::move(backend)),
      host_(std::move(host)) {}

BackendServer::~BackendServer() { stop(); }

Result<void> BackendServer::start() {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const BackendResponse out = backend_->handle(forwarded_from(req));
    res.status = out.status;
    res.set_content(out.body, out.content_type.empty() ? std::string("application/json")
                                                       : out.content_type);
  };
  auto& server = impl_->runner.server;
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  server.Patch(".*", handler);
  auto started = impl_->runner.start(host_, 0);
  if (!started) return started;
  port_ = impl_->runner.port;
  return {};
}

void BackendServer::stop() {
  if (impl_) impl_->runner.stop();
}

// ---------------------------------------------------------------------------
// HttpForwarder

void HttpForwarder::bind(std::string target, std::string host, int port) {
  endpoints_[std::move(target)] = Endpoint{std::move(host), port};
}

Result<BackendResponse> HttpForwarder::send(const std::string& target,
                                            const ForwardedRequest& req) {
  auto it = endpoints_.find(target);
  if (it == endpoints_.end()) {
    return Result<BackendResponse>(make_error(
        Errc::kBackendUnavailable, "no endpoint bound for target " + target));
  }
  count(target);
  auto& cli = client_for(it->second.host, it->second.port);
  auto result = dispatch(cli, req.method, req.path, headers_from(req),
                         req.body, req.content_type);
  if (!result) {
    return Result<BackendResponse>(
        make_error(Errc::kBackendUnavailable,
                   "transport failure to " + target + ": " +
                       httplib::to_string(result.error())));
  }
  BackendResponse out;
  out.status = result->status;
  out.body = result->body;
  out.content_type = result->get_header_value("Content-Type");
  return out;
}

// ---------------------------------------------------------------------------
// GatewayServer

struct GatewayServer::Impl {
  ServerRunner runner;
};

GatewayServer::GatewayServer(gateway::Gateway& gw, std::string host, int port)
    : impl_(std::make_unique<Impl>()),
      gateway_(gw),
      host_(std::move(host)),
      port_(port) {}

GatewayServer::~GatewayServer() { stop(); }

Result<void> GatewayServer::start() {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest in;
    in.method = req.method;
    in.path = req.path;
    in.body = req.body;
    in.content_type = req.get_header_value("Content-Type");
    for (const auto& [name, value] : req.headers) {
      in.set_header(name, value);
    }
    const HttpResponse out = gateway_.handle_request(in);
    res.status = out.status;
    res.set_content(out.body, out.content_type.empty() ? std::string("application/json")
                                                       : out.content_type);
  };
  auto& server = impl_->runner.server;
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  server.Patch(".*", handler);
  auto started = impl_->runner.start(host_, port_);
  if (!started) return started;
  port_ = impl_->runner.port;
  return {};
}

void GatewayServer::stop() {
  if (impl_) impl_->runner.stop();
}

// ---------------------------------------------------------------------------
// PolicyServer

struct PolicyServer::Impl {
  ServerRunner runner;
};

PolicyServer::PolicyServer(std::shared_ptr<policy::PolicyEngine> engine,
                           std::string host)
    : impl_(std::make_unique<Impl>()),
      engine_(std::move(engine)),
      host_(std::move(host)) {}

PolicyServer::~PolicyServer() { stop(); }

Result<void> PolicyServer::start() {
  auto& server = impl_->runner.server;
  server.Post("/internal/policy/check", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("user") ||
        !body.contains("name")) {
      res.status = 400;
      res.set_content(R"({"error":"check needs user and name"})",
                      "application/json");
      return;
    }
    const auto decision = engine_->check(body["user"].get<std::string>(),
                                         body["name"].get<std::string>());
    json out{{"decision",
              decision == policy::Decision::kAllow ? "ALLOW" : "DENY"}};
    res.status = 200;
    res.set_content(out.dump(), "application/json");
  });
  server.Post("/internal/policy/list", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("user")) {
      res.status = 400;
      res.set_content(R"({"error":"list needs user"})", "application/json");
      return;
    }
    auto effective =
        engine_->effective_permissions(body["user"].get<std::string>());
    if (!effective) {
      res.status = 404;
      res.set_content(error_body(effective.error().message,
                                 errc_name(effective.error().code), ""),
                      "application/json");
      return;
    }
    json perms = json::array();
    for (const auto& p : effective.value()) {
      perms.push_back(json{{"id", p.id},
                           {"name", p.name},
                           {"kind", policy::kind_name(p.kind)}});
    }
    json out{{"permissions", std::move(perms)}};
    res.status = 200;
    res.set_content(out.dump(), "application/json");
  });
  auto started = impl_->runner.start(host_, 0);
  if (!started) return started;
  port_ = impl_->runner.port;
  return {};
}

void PolicyServer::stop() {
  if (impl_) impl_->runner.stop();
}

// ---------------------------------------------------------------------------
// HttpPolicyPort

policy::Decision HttpPolicyPort::check(std::string_view user,
                                       std::string_view name) {
  auto& cli = client_for(host_, port_);
  json body{{"user", std::string(user)}, {"name", std::string(name)}};
  auto result = dispatch(cli, "POST", "/internal/policy/check", {},
                         body.dump(), "application/json");
  if (!result || result->status != 200) return policy::Decision::kDeny;
  json parsed = json::parse(result->body, nullptr, false);
  if (parsed.is_discarded()) return policy::Decision::kDeny;
  return parsed.value("decision", "DENY") == "ALLOW"
             ? policy::Decision::kAllow
             : policy::Decision::kDeny;
}

}  // namespace edgeiam::net
