#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace coclust {

/// splitmix64 finalizer; a bijective avalanche mix on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream roles. Each role gets a disjoint key so, e.g., keeping W does not
/// perturb the Bernoulli draws.
enum class StreamRole : std::uint64_t {
  kRowLatent = 1,
  kColLatent = 2,
  kBernoulli = 3,
  kFitRestart = 4,
  kSupportRestart = 5,
  kReplicate = 6,
  kDirection = 7,
  kInit = 8,
};

/// Derives a child key from a parent key and a path of indices.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(parent ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t p : path) key = mix64(key ^ mix64(p + 0x3C6EF372FE94F82BULL));
  return key;
}

/// Counter-based generator: the k-th draw is mix64(key + k * golden).
/// Copying a stream forks it; two streams with distinct keys never overlap
/// in practice.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}
  CounterStream(std::uint64_t seed, StreamRole role, std::uint64_t index = 0) noexcept
      : key_(derive_key(seed, {static_cast<std::uint64_t>(role), index})) {}

  std::uint64_t next() noexcept { return mix64(key_ + (counter_++) * 0xD1B54A32D192ED03ULL); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection keeps it exactly uniform.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % bound;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Fisher-Yates; portable across standard libraries unlike std::shuffle.
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace coclust
