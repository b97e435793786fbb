#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "modpol/hash.hpp"

namespace modpol {

// splitmix64 stream. All randomness in an Instance flows from streams of
// this kind, derived from the instance seed, so that runs are bit-exact
// reproducible across implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) by modulo. Bias is irrelevant at the pool sizes
  // governance draws use, and the reduction is trivially portable.
  uint64_t next_below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

  void skip(uint64_t n) {
    for (uint64_t i = 0; i < n; ++i) next();
  }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Named sub-stream derivation: one stream per consumer (module_id), all
// rooted in the instance seed.
inline SplitMix64 substream(uint64_t seed, std::string_view name) {
  return SplitMix64(seed ^ fnv1a64(name));
}

// Partial Fisher-Yates: draw k items from pool without replacement.
// Result order is selection order. Consumes exactly k words of the stream.
template <typename T>
std::vector<T> partial_fisher_yates(std::vector<T> pool, size_t k, SplitMix64& rng) {
  if (k > pool.size()) k = pool.size();
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace modpol
