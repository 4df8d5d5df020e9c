#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace sitekit::random {

// SplitMix64 finaliser (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

// Seed of the index-th independent substream derived from a master seed:
// splitmix64(seed + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every derived variate is computed
// here rather than through <random> distributions, whose algorithms are
// implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // (next() >> 11) * 2^-53, in [0, 1).
  double uniform();
  // Box-Muller on (1 - uniform(), uniform()); cosine branch first, the sine
  // branch is returned by the following call.
  double normal();
  // Unbiased integer in [0, n) by rejection of the low remainder band.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates from the back: for i = n-1..1 swap(a[i], a[below(i+1)]).
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sitekit::random
