#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace erd {

/// splitmix64 step; the generator behind RandomStream. Chosen over the
/// standard library distributions so that a fixed seed produces the same
/// stream on every platform and standard library.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream tags: one global seed fans out into independent streams so that
// toggling one randomized feature does not perturb the others.
namespace stream {
constexpr std::uint64_t init = 0x1;
constexpr std::uint64_t noise = 0x2;
constexpr std::uint64_t sampling = 0x3;
constexpr std::uint64_t shuffle = 0x4;
constexpr std::uint64_t data = 0x5;
}  // namespace stream

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {
    // burn-in so nearby seeds decorrelate
    splitmix64_next(state_);
    splitmix64_next(state_);
  }

  static RandomStream derive(std::uint64_t global_seed, std::uint64_t tag) {
    std::uint64_t s = global_seed ^ (0xA5A5A5A5DEADBEEFULL * (tag + 1));
    return RandomStream(s);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace erd
