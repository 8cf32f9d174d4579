#pragma once

#include <cstdint>
#include <vector>

namespace eqod {

/// Portable seedable generator: xoshiro256** whose 256-bit state is filled by
/// SplitMix64 from a (seed, stream) pair. Distinct streams of one seed are
/// statistically independent; identical (seed, stream) gives the identical
/// sequence on every platform. Normal variates use the Box-Muller transform
/// with the standard math library, so they match across IEEE-754 platforms
/// whose libm rounds log/sin/cos correctly.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  /// In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Random permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stream identifiers reserved for the identification pipeline. Data
/// generation uses the trajectory index (small integers) as its stream.
namespace streams {
inline constexpr std::uint64_t cv_permutation = 0x4356'0000'0000'0001ULL;
inline constexpr std::uint64_t stability_base = 0x5354'0000'0000'0000ULL;
}  // namespace streams

}  // namespace eqod
