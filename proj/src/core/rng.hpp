#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ssx {

/// Deterministic 64-bit generator (splitmix64). Bit-stable across platforms
/// and standard-library versions, unlike std::uniform_*_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, n). n == 0 returns 0.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  int range_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// `count` distinct indices from [0, m), sorted ascending (partial Fisher-Yates).
  std::vector<int> sample_indices(int m, int count) {
    std::vector<int> ids(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) ids[static_cast<std::size_t>(i)] = i;
    count = std::min(count, m);
    for (int i = 0; i < count; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(m - i)));
      std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }
    ids.resize(static_cast<std::size_t>(count));
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  /// Derive an independent sub-seed from (a, b).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    Rng r(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    r.next();
    return r.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace ssx
