#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace storyreel {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms; used for feature hashing and seed mixing.
std::uint64_t fnv1a64(std::string_view data) noexcept;

/// Derives an independent seed for a named stream from a run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream) noexcept;

} // namespace storyreel
