#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace wikimrc {

// 64-bit FNV-1a over a sequence of byte strings, with a separator byte
// between parts so ("ab","c") and ("a","bc") hash differently. The result is
// passed through a SplitMix64 finalizer.
uint64_t stable_hash(uint64_t seed, std::initializer_list<std::string_view> parts);

uint64_t splitmix64(uint64_t x);

// Seeded generator with platform-independent derived distributions.
// std::uniform_int_distribution and friends are implementation-defined, so
// all sampling is done here on top of the fully specified mt19937_64.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t below(uint64_t n);

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n) in sampled order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wikimrc
