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
#include <optional>
#include <string>
#include <string_view>

namespace edgeiam::crypto {

// base64url without padding (RFC 4648 §5). decode is strict about the
// alphabet and rejects strings with an impossible length.
std::string base64url_encode(std::string_view bytes);
std::optional<std::string> base64url_decode(std::string_view text);

std::string to_hex(std::string_view bytes);
std::optional<std::string> from_hex(std::string_view hex);

// Raw 32-byte HMAC-SHA256 digest.
std::string hmac_sha256(std::string_view key, std::string_view data);

// Timing-independent equality for secrets.
bool constant_time_equal(std::string_view a, std::string_view b);

std::string random_bytes(std::size_t n);
std::string uuid4();

struct ScryptParams {
  std::uint64_t n = 16384;
  std::uint32_t r = 8;
  std::uint32_t p = 1;
};

// 32-byte scrypt digest; memory-hard by parameter choice.
std::string scrypt(std::string_view password, std::string_view salt,
                   const ScryptParams& params);

}  // namespace edgeiam::crypto
