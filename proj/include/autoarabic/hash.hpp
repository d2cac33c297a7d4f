// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace autoarabic {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a; stable across platforms, used for seeded mock decisions.
constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace autoarabic
