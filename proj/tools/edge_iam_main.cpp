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

// edge-iam: operator client for the gateway API plus the embedded server
// and benchmark harness.

#include <sys/stat.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "edgeiam/app.hpp"
#include "edgeiam/bench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHttpError = 1;
constexpr int kExitTransport = 2;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

struct Session {
  std::string gateway = "http://127.0.0.1:8080";
  std::string token_file;
  bool json_output = false;

  std::string default_token_file() const {
    const char* home = std::getenv("HOME");
    return (fs::path(home != nullptr ? home : ".") / ".edge-iam" / "token")
        .string();
  }

  std::string resolved_token_file() const {
    if (!token_file.empty()) return token_file;
    if (const char* env = std::getenv("EDGE_IAM_TOKEN_FILE");
        env != nullptr && *env != '\0') {
      return env;
    }
    return default_token_file();
  }

  json load_session() const {
    std::ifstream in(resolved_token_file(), std::ios::binary);
    if (!in) return {};
    json doc = json::parse(in, nullptr, false);
    return doc.is_discarded() ? json{} : doc;
  }

  // Owner-only permissions on the stored token.
  bool store_session(const json& doc) const {
    const fs::path path = resolved_token_file();
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << doc.dump(2) << '\n';
    out.close();
    ::chmod(path.c_str(), S_IRUSR | S_IWUSR);
    return true;
  }

  std::string bearer() const {
    auto doc = load_session();
    return doc.value("access_token", "");
  }
};

httplib::Client make_client(const std::string& gateway) {
  httplib::Client cli(gateway);
  cli.set_connection_timeout(5, 0);
  cli.set_read_timeout(120, 0);
  return cli;
}

httplib::Headers auth_headers(const Session& session) {
  httplib::Headers headers;
  const std::string token = session.bearer();
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  return headers;
}

// Prints the outcome and maps it to an exit code: 0 for 2xx, 1 for any
// HTTP error, 2 when no response arrived at all.
int finish(const Session& session, const httplib::Result& result,
           const std::string& success_note = "") {
  if (!result) {
    std::cerr << "transport failure: " << httplib::to_string(result.error())
              << '\n';
    return kExitTransport;
  }
  const bool success = result->status >= 200 && result->status < 300;
  if (session.json_output) {
    if (!result->body.empty()) {
      std::cout << result->body << '\n';
    } else {
      std::cout << json{{"status", result->status}}.dump() << '\n';
    }
    return success ? kExitOk : kExitHttpError;
  }
  if (success) {
    if (!success_note.empty()) {
      std::cout << success_note << '\n';
    } else if (!result->body.empty()) {
      std::cout << result->body << '\n';
    } else {
      std::cout << "ok (" << result->status << ")\n";
    }
    return kExitOk;
  }
  if (result->status == 401) {
    std::cerr << "login required or token expired\n";
  } else {
    json err = json::parse(result->body, nullptr, false);
    if (!err.is_discarded() && err.contains("error")) {
      std::cerr << "error (" << result->status
                << "): " << err["error"].get<std::string>() << '\n';
    } else {
      std::cerr << "error (" << result->status << ")\n";
    }
  }
  return kExitHttpError;
}

json parse_subject(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {};
  const std::string kind = text.substr(0, colon);
  const std::string id = text.substr(colon + 1);
  if (id.empty()) return {};
  if (kind == "user") return json{{"kind", "USER"}, {"id", id}};
  if (kind == "org") return json{{"kind", "ORG"}, {"id", id}};
  return {};
}

int run_serve(const std::string& config_path, const std::string& seed_path) {
  edgeiam::app::DeploymentConfig config;
  if (!config_path.empty()) {
    auto loaded = edgeiam::app::DeploymentConfig::load(config_path);
    if (!loaded) {
      std::cerr << "config error: " << loaded.error().message << '\n';
      return kExitTransport;
    }
    config = loaded.value();
  } else {
    config.apply_env_overrides();
  }

  auto system = edgeiam::app::System::boot(config);
  if (!system) {
    std::cerr << "boot failed: " << system.error().message << '\n';
    return kExitTransport;
  }
  if (!seed_path.empty()) {
    auto seeded = system.value()->seed_file(seed_path);
    if (!seeded) {
      std::cerr << "seed failed: " << seeded.error().message << '\n';
      return kExitTransport;
    }
  }
  if (auto listening = system.value()->listen(); !listening) {
    std::cerr << "listen failed: " << listening.error().message << '\n';
    return kExitTransport;
  }
  std::cout << "edge-iam gateway listening on " << config.listen_host << ':'
            << system.value()->port() << " (" << config.store_backend
            << " store, " << config.topology << " topology)\n";

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  std::cout << "shutting down\n";
  system.value()->stop();
  return kExitOk;
}

int run_bench_single(const std::string& mode_text, int n, int depth,
                     int concurrency, double fraction, int warmup,
                     const std::string& out_path, bool json_output) {
  edgeiam::bench::FlowSpec spec;
  spec.mode = mode_text == "without-iam"
                  ? edgeiam::bench::FlowMode::kWithoutIam
                  : edgeiam::bench::FlowMode::kWithIam;
  spec.n_requests = n;
  spec.chain_depth = depth;
  spec.concurrency = concurrency;
  spec.authorized_fraction = fraction;
  spec.warmup_requests = warmup;

  auto metrics = edgeiam::bench::run_flow(spec);
  if (!metrics) {
    std::cerr << "bench failed: " << metrics.error().message << '\n';
    return kExitTransport;
  }
  const auto& m = metrics.value();
  json doc{{"mode", std::string(edgeiam::bench::flow_mode_name(spec.mode))},
           {"n", n},
           {"depth", depth},
           {"concurrency", concurrency},
           {"authorized_fraction", fraction},
           {"total_ms", m.total_wall_ms},
           {"throughput_req_min", m.throughput_req_min},
           {"reject_latency_mean_ms", m.reject_latency_mean_ms},
           {"policy_effective_calls", m.policy_effective_calls},
           {"policy_check_calls", m.policy_check_calls},
           {"latencies_ms", m.per_request_latency_ms}};
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
  }
  if (json_output) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::printf("%s: n=%d depth=%d concurrency=%d\n",
                std::string(edgeiam::bench::flow_mode_name(spec.mode)).c_str(),
                n, depth, concurrency);
    std::printf("  total: %.0f ms, throughput ~ %.0f req/min\n",
                m.total_wall_ms, m.throughput_req_min);
    if (m.rejected > 0) {
      std::printf("  mean reject latency: %.2f ms over %llu rejects\n",
                  m.reject_latency_mean_ms,
                  static_cast<unsigned long long>(m.rejected));
    }
    std::printf("  policy calls: %llu resolutions, %llu checks\n",
                static_cast<unsigned long long>(m.policy_effective_calls),
                static_cast<unsigned long long>(m.policy_check_calls));
  }
  return kExitOk;
}

int run_bench_compare(const std::string& n_csv, int depth, int concurrency,
                      const std::string& out_path, bool json_output) {
  std::vector<int> n_list;
  std::stringstream stream(n_csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      n_list.push_back(std::stoi(item));
    } catch (const std::exception&) {
      std::cerr << "bad request count: " << item << '\n';
      return kExitTransport;
    }
  }
  auto report = edgeiam::bench::compare_flows(n_list, depth, concurrency);
  if (!report) {
    std::cerr << "bench failed: " << report.error().message << '\n';
    return kExitTransport;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << report.value().to_json_text() << '\n';
  }
  std::cout << (json_output ? report.value().to_json_text() + "\n"
                            : report.value().to_text());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-placed identity and access management stack"};
  app.require_subcommand(1);

  Session session;
  app.add_option("--gateway", session.gateway, "gateway base URL")
      ->capture_default_str();
  app.add_option("--token-file", session.token_file,
                 "session token path (default ~/.edge-iam/token, env "
                 "EDGE_IAM_TOKEN_FILE)");
  app.add_flag("--json", session.json_output, "machine-readable output");

  // serve
  auto* serve = app.add_subcommand("serve", "run the full stack");
  std::string config_path;
  std::string seed_path;
  serve->add_option("--config", config_path, "deployment config JSON");
  serve->add_option("--seed", seed_path, "fixtures JSON to load at boot");

  // register
  auto* reg = app.add_subcommand("register", "create an account");
  std::string username;
  std::string password;
  std::string org;
  std::vector<std::string> info_pairs;
  reg->add_option("-u,--username", username)->required();
  reg->add_option("-p,--password", password)->required();
  reg->add_option("--org", org, "organization name (default: username)");
  reg->add_option("--info", info_pairs, "personal info as key=value");

  // login
  auto* login = app.add_subcommand("login", "obtain an access token");
  login->add_option("-u,--username", username)->required();
  login->add_option("-p,--password", password)->required();

  // whoami
  auto* whoami = app.add_subcommand("whoami", "show the cached session");

  // member add|rm
  auto* member = app.add_subcommand("member", "organization membership");
  member->require_subcommand(1);
  std::string member_org;
  std::string member_user;
  std::string temp_password;
  auto* member_add = member->add_subcommand("add", "add a member");
  member_add->add_option("org", member_org)->required();
  member_add->add_option("username", member_user)->required();
  member_add->add_option("temp_password", temp_password)->required();
  auto* member_rm = member->add_subcommand("rm", "remove a member");
  member_rm->add_option("org", member_org)->required();
  member_rm->add_option("username", member_user)->required();

  // perm grant|revoke
  auto* perm = app.add_subcommand("perm", "permission administration");
  perm->require_subcommand(1);
  std::string perm_org;
  std::string subject_text;
  std::string perm_name;
  std::string perm_kind = "ALLOW";
  auto add_perm_options = [&](CLI::App* cmd) {
    cmd->add_option("org", perm_org)->required();
    cmd->add_option("--subject", subject_text, "user:<name> or org:<name>")
        ->required();
    cmd->add_option("--name", perm_name, "permission name")->required();
    cmd->add_option("--kind", perm_kind, "ALLOW or DENY")
        ->capture_default_str();
  };
  auto* perm_grant = perm->add_subcommand("grant", "add a grant");
  add_perm_options(perm_grant);
  auto* perm_revoke = perm->add_subcommand("revoke", "remove a grant");
  add_perm_options(perm_revoke);

  // config put|get
  auto* config = app.add_subcommand("config", "configuration entries");
  config->require_subcommand(1);
  std::string config_ns;
  std::string config_name;
  std::string config_file;
  std::string config_out;
  auto* config_put = config->add_subcommand("put", "store a configuration");
  config_put->add_option("namespace", config_ns)->required();
  config_put->add_option("name", config_name)->required();
  config_put->add_option("file", config_file, "payload file, '-' for stdin")
      ->required();
  auto* config_get = config->add_subcommand("get", "fetch a configuration");
  config_get->add_option("namespace", config_ns)->required();
  config_get->add_option("name", config_name)->required();
  config_get->add_option("-o,--out", config_out, "write payload to file");

  // bench run|compare
  auto* bench_cmd = app.add_subcommand("bench", "flow benchmarks");
  bench_cmd->require_subcommand(1);
  std::string bench_mode = "with-iam";
  int bench_n = 100;
  int bench_depth = 3;
  int bench_concurrency = 8;
  double bench_fraction = 1.0;
  int bench_warmup = 50;
  std::string bench_out;
  std::string bench_n_csv = "10,500,1000";
  auto* bench_run = bench_cmd->add_subcommand("run", "run one flow");
  bench_run->add_option("--mode", bench_mode, "with-iam or without-iam")
      ->check(CLI::IsMember({"with-iam", "without-iam"}))
      ->capture_default_str();
  bench_run->add_option("--n", bench_n, "request count")
      ->capture_default_str();
  bench_run->add_option("--depth", bench_depth, "service chain depth")
      ->capture_default_str();
  bench_run->add_option("--concurrency", bench_concurrency)
      ->capture_default_str();
  bench_run->add_option("--authorized-fraction", bench_fraction)
      ->capture_default_str();
  bench_run->add_option("--warmup", bench_warmup)->capture_default_str();
  bench_run->add_option("--out", bench_out, "write metrics JSON here");
  auto* bench_compare = bench_cmd->add_subcommand(
      "compare", "run both flows over a list of request counts");
  bench_compare->add_option("--n", bench_n_csv, "comma-separated counts")
      ->capture_default_str();
  bench_compare->add_option("--depth", bench_depth)->capture_default_str();
  bench_compare->add_option("--concurrency", bench_concurrency)
      ->capture_default_str();
  bench_compare->add_option("--out", bench_out, "write report JSON here");

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) return run_serve(config_path, seed_path);

  if (bench_run->parsed()) {
    return run_bench_single(bench_mode, bench_n, bench_depth,
                            bench_concurrency, bench_fraction, bench_warmup,
                            bench_out, session.json_output);
  }
  if (bench_compare->parsed()) {
    return run_bench_compare(bench_n_csv, bench_depth, bench_concurrency,
                             bench_out, session.json_output);
  }

  if (whoami->parsed()) {
    auto doc = session.load_session();
    if (!doc.contains("access_token")) {
      std::cerr << "login required or token expired\n";
      return kExitHttpError;
    }
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    const auto expires_at = doc.value("expires_at", std::int64_t{0});
    if (now >= expires_at) {
      std::cerr << "login required or token expired\n";
      return kExitHttpError;
    }
    if (session.json_output) {
      json out{{"username", doc.value("username", "")},
               {"gateway", doc.value("gateway", "")},
               {"expires_at", expires_at}};
      std::cout << out.dump() << '\n';
    } else {
      std::cout << doc.value("username", "") << " @ "
                << doc.value("gateway", "") << " (token valid for "
                << (expires_at - now) << "s)\n";
    }
    return kExitOk;
  }

  auto cli = make_client(session.gateway);

  if (reg->parsed()) {
    json body{{"username", username}, {"password", password}};
    if (!org.empty()) body["org_name"] = org;
    json info = json::object();
    for (const auto& pair : info_pairs) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--info expects key=value, got " << pair << '\n';
        return kExitTransport;
      }
      info[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    if (!info.empty()) body["personal_info"] = info;
    auto result =
        cli.Post("/api/v1/auth/register", body.dump(), "application/json");
    return finish(session, result, "registered " + username);
  }

  if (login->parsed()) {
    json body{{"username", username}, {"password", password}};
    auto result =
        cli.Post("/api/v1/auth/login", body.dump(), "application/json");
    if (result && result->status == 200) {
      json parsed = json::parse(result->body, nullptr, false);
      if (parsed.is_discarded()) {
        std::cerr << "malformed login response\n";
        return kExitTransport;
      }
      json stored{{"gateway", session.gateway},
                  {"username", username},
                  {"access_token", parsed["access_token"]},
                  {"expires_at", parsed["expires_at"]}};
      if (!session.store_session(stored)) {
        std::cerr << "cannot write " << session.resolved_token_file() << '\n';
        return kExitTransport;
      }
      return finish(session, result, "logged in as " + username);
    }
    return finish(session, result);
  }

  if (member_add->parsed()) {
    json body{{"username", member_user}, {"temp_password", temp_password}};
    auto result =
        cli.Post("/api/v1/orgs/" + member_org + "/members",
                 auth_headers(session), body.dump(), "application/json");
    return finish(session, result,
                  "added " + member_user + " to " + member_org);
  }
  if (member_rm->parsed()) {
    auto result =
        cli.Delete("/api/v1/orgs/" + member_org + "/members/" + member_user,
                   auth_headers(session));
    return finish(session, result,
                  "removed " + member_user + " from " + member_org);
  }

  if (perm_grant->parsed() || perm_revoke->parsed()) {
    const json subject = parse_subject(subject_text);
    if (subject.is_null()) {
      std::cerr << "--subject expects user:<name> or org:<name>\n";
      return kExitTransport;
    }
    json body{{"subject", subject}, {"name", perm_name}, {"kind", perm_kind}};
    const std::string path = "/api/v1/orgs/" + perm_org + "/permissions";
    auto result = perm_grant->parsed()
                      ? cli.Post(path, auth_headers(session), body.dump(),
                                 "application/json")
                      : cli.Delete(path, auth_headers(session), body.dump(),
                                   "application/json");
    return finish(session, result,
                  (perm_grant->parsed() ? "granted " : "revoked ") + perm_name);
  }

  if (config_put->parsed()) {
    std::string payload;
    if (config_file == "-") {
      std::stringstream buffer;
      buffer << std::cin.rdbuf();
      payload = buffer.str();
    } else {
      std::ifstream in(config_file, std::ios::binary);
      if (!in) {
        std::cerr << "cannot read " << config_file << '\n';
        return kExitTransport;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      payload = buffer.str();
    }
    auto result = cli.Put("/api/v1/configs/" + config_ns + "/" + config_name,
                          auth_headers(session), payload,
                          "application/octet-stream");
    if (result && result->status == 201 && !session.json_output) {
      json parsed = json::parse(result->body, nullptr, false);
      if (!parsed.is_discarded()) {
        std::cout << "stored " << config_ns << '/' << config_name
                  << " version " << parsed.value("version", 0) << '\n';
        return kExitOk;
      }
    }
    return finish(session, result);
  }
  if (config_get->parsed()) {
    auto result = cli.Get("/api/v1/configs/" + config_ns + "/" + config_name,
                          auth_headers(session));
    if (result && result->status == 200) {
      if (!config_out.empty()) {
        std::ofstream out(config_out, std::ios::binary | std::ios::trunc);
        out << result->body;
        if (!session.json_output) {
          std::cout << "wrote " << result->body.size() << " bytes to "
                    << config_out << '\n';
        }
      } else {
        std::cout << result->body;
      }
      return kExitOk;
    }
    return finish(session, result);
  }

  return kExitTransport;
}
