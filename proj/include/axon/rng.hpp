#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace axon {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derive an independent stream seed from a root seed, a stream label and an
/// index. Streams for different labels never collide, so adding a new
/// consumer of randomness does not perturb existing ones. Construction:
/// splitmix64(splitmix64(root ^ fnv1a64(label)) ^ index).
inline std::uint64_t seed_for(std::uint64_t root, std::string_view label,
                              std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return splitmix64(splitmix64(root ^ h) ^ index);
}

/// Seeded generator with portable output. std::mt19937_64 has a fully
/// specified sequence; the distributions below avoid <random>'s
/// implementation-defined ones so results are identical across standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal deviate (Box-Muller, second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform direction on the unit sphere in R^k.
  std::vector<double> unit_sphere(std::size_t k) {
    std::vector<double> v(k);
    for (;;) {
      double norm_sq = 0.0;
      for (auto& x : v) {
        x = normal();
        norm_sq += x * x;
      }
      if (norm_sq > 1e-24) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : v) x *= inv;
        return v;
      }
    }
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace axon
