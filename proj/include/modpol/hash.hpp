#pragma once

#include <cstdint>
#include <string_view>

namespace modpol {

// 64-bit FNV-1a. Used for state digests, monitor input digests and
// module source hashes. Stable across platforms by construction.
inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x00000100000001b3ull;

constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= static_cast<uint64_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr uint64_t fnv1a64_u64(uint64_t v, uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace modpol
