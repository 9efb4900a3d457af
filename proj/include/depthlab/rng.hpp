#pragma once

#include <cstdint>
#include <string_view>

namespace depthlab {

/// splitmix64 finalizer. Stateless: good both as a bijective scrambler for
/// lattice hashing and as the stream function of the sequential generator.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_mix(uint64_t a, uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

/// Map a 64-bit hash to [0,1) with full 53-bit mantissa resolution.
inline double hash_to_unit(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Derive an independent stream from (seed, name). Named substreams keep the
/// public surface to a single seed while decoupling consumers: adding a new
/// consumer never perturbs existing ones.
inline uint64_t substream(uint64_t seed, std::string_view name) {
  uint64_t h = splitmix64(seed);
  for (char c : name) h = hash_mix(h, static_cast<unsigned char>(c));
  return h;
}

/// Minimal sequential generator over splitmix64.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return hash_to_unit(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace depthlab
