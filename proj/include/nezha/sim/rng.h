#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nezha::sim {

using Engine = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent stream seed from the scenario seed and a stable label,
// so streams are keyed by name rather than by construction order.
inline uint64_t stream_seed(uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ splitmix64(fnv1a(label)));
}

inline Engine make_stream(uint64_t seed, std::string_view label) {
  return Engine{stream_seed(seed, label)};
}

}  // namespace nezha::sim
