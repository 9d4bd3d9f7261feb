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
#include <string>
#include <vector>

#include "edgeiam/clock.hpp"
#include "edgeiam/errors.hpp"
#include "edgeiam/policy.hpp"
#include "edgeiam/store.hpp"

namespace edgeiam::bench {

// The two flows under comparison, both driving config PUTs end to end:
//
//   kWithIam    client -> gateway (verify + resolve + mint, in process)
//               -> chain of services over loopback HTTP, each trusting the
//               permission JWT; zero policy traffic past the edge.
//
//   kWithoutIam client -> gateway (pure router) -> same chain, but every
//               service calls the policy engine over loopback HTTP before
//               doing its part.
enum class FlowMode { kWithIam, kWithoutIam };

std::string_view flow_mode_name(FlowMode mode);

struct FlowSpec {
  FlowMode mode = FlowMode::kWithIam;
  int n_requests = 0;
  int chain_depth = 3;  // services a request traverses, final one included
  int concurrency = 1;
  double authorized_fraction = 1.0;
  int warmup_requests = 50;  // excluded from metrics and counters

  Result<void> validate() const;
};

struct FlowMetrics {
  std::vector<double> per_request_latency_ms;  // length == n_requests
  double total_wall_ms = 0;
  double throughput_req_min = 0;
  double reject_latency_mean_ms = 0;  // unauthorized subset only

  // Instrumentation snapshots for the run (post-warmup).
  std::uint64_t policy_effective_calls = 0;
  std::uint64_t policy_check_calls = 0;
  std::uint64_t rejected = 0;
  std::uint64_t completed = 0;
  std::uint64_t first_service_invocations = 0;
};

// One fully wired stack per harness: gateway (and its IAM components) in
// process, chain services and the policy RPC surface on loopback sockets.
class Harness {
 public:
  Harness(FlowMode mode, int chain_depth,
          std::shared_ptr<Clock> clock = nullptr);
  ~Harness();

  Result<void> start();
  Result<FlowMetrics> run(const FlowSpec& spec);

  store::Store& data_store();
  policy::PolicyStats policy_stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Result<FlowMetrics> run_flow(const FlowSpec& spec);

struct CompareRow {
  int n = 0;
  double with_iam_total_ms = 0;
  double without_iam_total_ms = 0;
  double ratio = 0;  // with / without
};

struct CompareReport {
  std::vector<CompareRow> rows;
  int chain_depth = 0;
  int concurrency = 0;
  double with_iam_throughput_req_min = 0;
  double without_iam_throughput_req_min = 0;
  double with_iam_reject_mean_ms = 0;
  double without_iam_reject_mean_ms = 0;

  std::string to_text() const;
  std::string to_json_text() const;
};

// Runs both flows for each n, plus one unauthorized-only pair for the
// rejection-latency line.
Result<CompareReport> compare_flows(const std::vector<int>& n_list, int depth,
                                    int concurrency = 8,
                                    int reject_probe_requests = 200);

}  // namespace edgeiam::bench
