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

#include "edgeiam/store.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <system_error>

#include <json.hpp>

namespace edgeiam::store {

namespace fs = std::filesystem;
using nlohmann::json;

bool valid_namespace(std::string_view ns) {
  return std::find(kNamespaces.begin(), kNamespaces.end(), ns) !=
         kNamespaces.end();
}

bool StoreKey::well_formed() const {
  return valid_namespace(ns) && !id.empty() &&
         id.find('/') == std::string::npos;
}

namespace {

Error bad_key(const StoreKey& key) {
  return make_error(Errc::kInvalidKey,
                    "malformed store key " + key.ns + "/" + key.id);
}

Error injected_fault() {
  return make_error(Errc::kStoreIo, "injected storage fault");
}

// Shared fail-after-N countdown. Armed with the number of mutations that
// should still succeed; fires once, before any effect, then disarms.
class FaultHook {
 public:
  void arm(std::uint64_t ops) {
    std::lock_guard lock(mu_);
    armed_ = true;
    remaining_ = ops;
  }
  void clear() {
    std::lock_guard lock(mu_);
    armed_ = false;
  }
  // True when the current mutation must fail.
  bool fire() {
    std::lock_guard lock(mu_);
    if (!armed_) return false;
    if (remaining_ == 0) {
      armed_ = false;
      return true;
    }
    --remaining_;
    return false;
  }

 private:
  std::mutex mu_;
  bool armed_ = false;
  std::uint64_t remaining_ = 0;
};

class MemoryStore final : public Store {
 public:
  Result<std::uint64_t> put(const StoreKey& key,
                            std::string_view value) override {
    if (!key.well_formed()) return bad_key(key);
    std::lock_guard lock(mu_);
    if (fault_.fire()) return injected_fault();
    auto& slot = data_[key.ns][key.id];
    slot.second += 1;
    slot.first.assign(value);
    return slot.second;
  }

  Result<std::optional<StoreRecord>> get(const StoreKey& key) override {
    if (!key.well_formed()) return Result<std::optional<StoreRecord>>(bad_key(key));
    std::lock_guard lock(mu_);
    auto ns_it = data_.find(key.ns);
    if (ns_it == data_.end()) return std::optional<StoreRecord>{};
    auto it = ns_it->second.find(key.id);
    if (it == ns_it->second.end()) return std::optional<StoreRecord>{};
    return std::optional<StoreRecord>(
        StoreRecord{key, it->second.first, it->second.second});
  }

  Result<bool> remove(const StoreKey& key) override {
    if (!key.well_formed()) return Result<bool>(bad_key(key));
    std::lock_guard lock(mu_);
    if (fault_.fire()) return Result<bool>(injected_fault());
    auto ns_it = data_.find(key.ns);
    if (ns_it == data_.end()) return false;
    return ns_it->second.erase(key.id) > 0;
  }

  Result<std::vector<StoreRecord>> list_prefix(
      std::string_view ns, std::string_view id_prefix) override {
    if (!valid_namespace(ns)) {
      return Result<std::vector<StoreRecord>>(
          make_error(Errc::kInvalidKey, "unknown namespace " + std::string(ns)));
    }
    std::lock_guard lock(mu_);
    std::vector<StoreRecord> out;
    auto ns_it = data_.find(std::string(ns));
    if (ns_it == data_.end()) return out;
    for (auto it = ns_it->second.lower_bound(std::string(id_prefix));
         it != ns_it->second.end(); ++it) {
      if (it->first.compare(0, id_prefix.size(), id_prefix) != 0) break;
      out.push_back(StoreRecord{StoreKey{std::string(ns), it->first},
                                it->second.first, it->second.second});
    }
    return out;
  }

  void fail_after(std::uint64_t ops) override { fault_.arm(ops); }
  void clear_fault() override { fault_.clear(); }

 private:
  std::mutex mu_;
  // namespace -> id -> (value, version); ordered for prefix scans
  std::map<std::string, std::map<std::string, std::pair<std::string, std::uint64_t>>>
      data_;
  FaultHook fault_;
};

class FileStore final : public Store {
 public:
  explicit FileStore(fs::path root) : root_(std::move(root)) {}

  Result<void> init() {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) return io_error("create " + root_.string(), ec);
    for (auto ns : kNamespaces) {
      fs::create_directories(root_ / ns, ec);
      if (ec) return io_error("create namespace dir", ec);
    }
    return {};
  }

  Result<std::uint64_t> put(const StoreKey& key,
                            std::string_view value) override {
    if (!key.well_formed()) return bad_key(key);
    std::lock_guard lock(mu_);
    if (fault_.fire()) return injected_fault();

    std::uint64_t version = 1;
    if (auto existing = read_envelope(record_path(key))) {
      version = existing->first + 1;
    }

    json envelope;
    envelope["version"] = version;
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) {
      envelope["value"] = std::string(value);
    } else {
      envelope["value"] = std::move(parsed);
    }

    const fs::path final_path = record_path(key);
    const fs::path tmp_path =
        root_ / key.ns / ("." + key.id + ".tmp");
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out) return io_error("open " + tmp_path.string(), {});
      out << envelope.dump();
      out.flush();
      if (!out) return io_error("write " + tmp_path.string(), {});
    }
    std::error_code ec;
    fs::rename(tmp_path, final_path, ec);
    if (ec) return io_error("rename to " + final_path.string(), ec);
    return version;
  }

  Result<std::optional<StoreRecord>> get(const StoreKey& key) override {
    if (!key.well_formed()) return Result<std::optional<StoreRecord>>(bad_key(key));
    std::lock_guard lock(mu_);
    auto envelope = read_envelope(record_path(key));
    if (!envelope) return std::optional<StoreRecord>{};
    return std::optional<StoreRecord>(
        StoreRecord{key, std::move(envelope->second), envelope->first});
  }

  Result<bool> remove(const StoreKey& key) override {
    if (!key.well_formed()) return Result<bool>(bad_key(key));
    std::lock_guard lock(mu_);
    if (fault_.fire()) return Result<bool>(injected_fault());
    std::error_code ec;
    const bool existed = fs::remove(record_path(key), ec);
    if (ec) return Result<bool>(io_error("remove " + key.id, ec));
    return existed;
  }

  Result<std::vector<StoreRecord>> list_prefix(
      std::string_view ns, std::string_view id_prefix) override {
    if (!valid_namespace(ns)) {
      return Result<std::vector<StoreRecord>>(
          make_error(Errc::kInvalidKey, "unknown namespace " + std::string(ns)));
    }
    std::lock_guard lock(mu_);
    std::vector<StoreRecord> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / ns, ec)) {
      if (!entry.is_regular_file()) continue;
      const fs::path& p = entry.path();
      if (p.extension() != ".json") continue;
      const std::string id = p.stem().string();
      if (id.compare(0, id_prefix.size(), id_prefix) != 0) continue;
      auto envelope = read_envelope(p);
      if (!envelope) continue;  // torn write; skip
      out.push_back(StoreRecord{StoreKey{std::string(ns), id},
                                std::move(envelope->second), envelope->first});
    }
    if (ec) {
      return Result<std::vector<StoreRecord>>(io_error("scan " + std::string(ns), ec));
    }
    std::sort(out.begin(), out.end(),
              [](const StoreRecord& a, const StoreRecord& b) {
                return a.key.id < b.key.id;
              });
    return out;
  }

  void fail_after(std::uint64_t ops) override { fault_.arm(ops); }
  void clear_fault() override { fault_.clear(); }

 private:
  static Error io_error(const std::string& what, const std::error_code& ec) {
    std::string msg = "file store: " + what;
    if (ec) msg += ": " + ec.message();
    return make_error(Errc::kStoreIo, msg);
  }

  fs::path record_path(const StoreKey& key) const {
    return root_ / key.ns / (key.id + ".json");
  }

  // (version, value) from a record file, or nullopt when absent/unreadable.
  std::optional<std::pair<std::uint64_t, std::string>> read_envelope(
      const fs::path& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    json envelope = json::parse(text, nullptr, false);
    if (envelope.is_discarded() || !envelope.contains("version") ||
        !envelope.contains("value")) {
      return std::nullopt;
    }
    const auto version = envelope["version"].get<std::uint64_t>();
    const json& value = envelope["value"];
    if (value.is_string()) {
      return std::make_pair(version, value.get<std::string>());
    }
    return std::make_pair(version, value.dump());
  }

  fs::path root_;
  std::mutex mu_;
  FaultHook fault_;
};

}  // namespace

std::unique_ptr<Store> make_memory_store() {
  return std::make_unique<MemoryStore>();
}

Result<std::unique_ptr<Store>> make_file_store(const fs::path& root) {
  auto store = std::make_unique<FileStore>(root);
  if (auto init = store->init(); !init) {
    return Result<std::unique_ptr<Store>>(init.error());
  }
  return Result<std::unique_ptr<Store>>(std::move(store));
}

}  // namespace edgeiam::store
