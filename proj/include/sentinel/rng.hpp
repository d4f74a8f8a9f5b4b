#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace sentinel {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child key from a parent key and a list of integer tags.
std::uint64_t derive_seed(std::uint64_t key, std::initializer_list<std::uint64_t> tags) noexcept;

/// Counter-based generator: the n-th output is mix64(key + n * golden).
/// Streams are independent and platform-stable; no hidden global state.
class Rng {
public:
  explicit Rng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  template <class T> void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <class T> void shuffle(std::vector<T>& items) noexcept { shuffle(std::span<T>(items)); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace sentinel
