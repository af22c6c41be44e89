#pragma once

#include <cstdint>
#include <initializer_list>

namespace equalab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed path, e.g. (master, snr index, frame, stream).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v));
  return h;
}

}  // namespace equalab
