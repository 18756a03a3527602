#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace treebandit {

// splitmix64 finalizer; used to fold ids into seeds.
inline std::uint64_t mix_bits(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and a path of ids,
// e.g. derive_seed(seed, {kUserStream, user, round}). Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix_bits(base);
  for (std::uint64_t p : path) s = mix_bits(s ^ mix_bits(p));
  return s;
}

// Deterministic RNG wrapper. The engine (mt19937_64) and every distribution
// below are pinned by this code, not by the standard library's unspecified
// distribution algorithms, so identical seeds give identical streams on any
// platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n), unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t x, r;
    do {
      x = engine_();
      r = x % n;
    } while (x - r > std::uint64_t(-1) - (n - 1));
    return r;
  }

  // Standard normal, Box-Muller.
  double normal() {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Uniform k-subset of {0, ..., n-1} by Floyd's algorithm, returned sorted.
  // k >= n returns the full index range.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> out;
    if (k >= n) {
      out.resize(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = i;
      return out;
    }
    out.reserve(k);
    for (std::size_t i = n - k; i < n; ++i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i + 1));
      if (std::find(out.begin(), out.end(), j) != out.end()) {
        out.push_back(i);
      } else {
        out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  std::mt19937_64 engine_;
};

// Stream tags for derive_seed paths; keeps unrelated streams from colliding.
enum StreamTag : std::uint64_t {
  kWorldStream = 1,
  kTreeStream = 2,
  kOrderStream = 3,
  kUserStream = 4,
};

}  // namespace treebandit
