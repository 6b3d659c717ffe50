#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mvstack {

// Deterministic seed derivation. Every stochastic sub-task (a fold shuffle, a
// tree, an imputation round) draws from its own substream whose seed depends
// only on the user seed and the task coordinates, never on scheduling order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_chain(std::uint64_t base,
                                std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
  return h;
}

// Substream tags used across the library.
namespace seed_tag {
inline constexpr std::uint64_t outer_folds = 0x01;
inline constexpr std::uint64_t inner_folds = 0x02;
inline constexpr std::uint64_t submodel = 0x03;
inline constexpr std::uint64_t oos = 0x04;
inline constexpr std::uint64_t oos_fold = 0x05;
inline constexpr std::uint64_t tree = 0x06;
inline constexpr std::uint64_t impute = 0x07;
inline constexpr std::uint64_t adaptive = 0x08;
inline constexpr std::uint64_t sim_x = 0x09;
inline constexpr std::uint64_t sim_sign = 0x0a;
inline constexpr std::uint64_t sim_y = 0x0b;
}  // namespace seed_tag

using RngEngine = std::mt19937_64;

// Uniform draw in [0, n) by rejection; avoids the implementation-defined
// behaviour of std::uniform_int_distribution.
inline std::uint64_t draw_below(RngEngine& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

template <typename T>
void shuffle_in_place(std::vector<T>& values, RngEngine& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[draw_below(rng, i)]);
  }
}

}  // namespace mvstack
