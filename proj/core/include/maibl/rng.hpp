#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace maibl {

// Stream splitter used for labeled sub-seeding. Every component of a run
// (each agent, the environment) gets its own stream derived from the master
// seed, a label, and an index, so streams stay disjoint no matter how many
// components a run has or in which order they draw.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::string_view label,
                                           std::uint64_t index = 0) {
  std::uint64_t x = splitmix64(master ^ fnv1a64(label));
  return splitmix64(x ^ index);
}

// mt19937_64 wrapper producing doubles by fixed bit manipulation instead of
// std::uniform_real_distribution, whose output is not pinned down by the
// standard. Everything here is reproducible across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in the open interval (0, 1); safe to feed into log().
  double next_open() {
    return (static_cast<double>(gen_() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform integer in [0, n). Lemire's multiply-shift; the bias of
  // ~n/2^64 is irrelevant at the n <= 5 sizes used here.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace maibl
