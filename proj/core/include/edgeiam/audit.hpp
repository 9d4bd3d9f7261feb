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
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace edgeiam {

struct AuditEntry {
  std::uint64_t seq = 0;
  std::string event;
  std::string detail;
};

// Append-only in-process audit trail shared by the services. Queryable so
// tests can assert that denials and degraded rollbacks leave a trace.
class AuditLog {
 public:
  void append(std::string_view event, std::string_view detail) {
    std::lock_guard lock(mu_);
    entries_.push_back(
        AuditEntry{next_seq_++, std::string(event), std::string(detail)});
  }

  std::vector<AuditEntry> entries() const {
    std::lock_guard lock(mu_);
    return entries_;
  }

  std::size_t count(std::string_view event) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.event == event) ++n;
    }
    return n;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::uint64_t next_seq_ = 1;
  std::vector<AuditEntry> entries_;
};

}  // namespace edgeiam
