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

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeiam/errors.hpp"

namespace edgeiam::store {

// Fixed namespace catalog. Partitioning: identity owns "users"/"orgs",
// the policy engine owns "grants"/"inherit", the config service owns
// "configs", and the vault keeps "users"/"tokens"/"keys" in its own
// private store instance.
inline constexpr std::array<std::string_view, 7> kNamespaces = {
    "users", "orgs", "grants", "inherit", "configs", "tokens", "keys"};

bool valid_namespace(std::string_view ns);

struct StoreKey {
  std::string ns;
  std::string id;

  // Well-formed: namespace from the fixed set, non-empty id without '/'.
  bool well_formed() const;

  bool operator==(const StoreKey&) const = default;
};

struct StoreRecord {
  StoreKey key;
  std::string value;        // serialized entity, canonical UTF-8 JSON
  std::uint64_t version = 0;  // 1 on first put, +1 per overwrite
};

// Non-transactional key-value persistence. Single-key operations are
// atomic; there is deliberately no multi-key transaction, so multi-step
// writers must bring their own compensation logic.
//
// Failure injection (fail_after) is part of the contract: it lets tests
// fault the Nth mutation deterministically. Only mutating operations
// (put, remove) consume the countdown; the faulted operation returns
// kStoreIo before applying any effect, then the hook disarms.
class Store {
 public:
  virtual ~Store() = default;

  virtual Result<std::uint64_t> put(const StoreKey& key,
                                    std::string_view value) = 0;
  virtual Result<std::optional<StoreRecord>> get(const StoreKey& key) = 0;
  // Erases the record including its version history; a later put starts
  // again at version 1.
  virtual Result<bool> remove(const StoreKey& key) = 0;

  // All records in `ns` whose id starts with `id_prefix`, in lexicographic
  // id order.
  virtual Result<std::vector<StoreRecord>> list_prefix(
      std::string_view ns, std::string_view id_prefix) = 0;

  // After `ops` more successful mutations, the next mutation fails once.
  virtual void fail_after(std::uint64_t ops) = 0;
  virtual void clear_fault() = 0;
};

std::unique_ptr<Store> make_memory_store();

// One record per file: <root>/<namespace>/<id>.json holding
// {"version": n, "value": <entity>}. Namespace directories are created
// eagerly so the on-disk shape does not depend on write order.
Result<std::unique_ptr<Store>> make_file_store(
    const std::filesystem::path& root);

}  // namespace edgeiam::store
