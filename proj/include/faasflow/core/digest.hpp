#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace faasflow {

/// 64-bit FNV-1a. Stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

/// Lower-case, zero-padded 16-digit hex rendering.
std::string to_hex(std::uint64_t value);

}  // namespace faasflow
