#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fogplace {

// Every module draws from its own substream derived from the run seed, so
// reruns with the same seed are bit-identical and modules can be reordered
// or parallelized without perturbing each other's draws.
enum class SeedTag : std::uint64_t {
  Topology = 1,
  Delays = 2,
  Capacities = 3,
  Profiles = 4,
  Requests = 5,
  Ingress = 6,
  Plans = 7,
  Tree = 8,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, SeedTag tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
  s = mix64(s ^ (static_cast<std::uint64_t>(tag) + 0x9e3779b97f4a7c15ULL));
  s = mix64(s ^ (a + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ (b + 0xd6e8feb86659fd93ULL));
  return s;
}

// mt19937_64 with hand-rolled sampling on top. The engine's output sequence
// is pinned by the standard; the std::*_distribution adapters are not, so
// using them would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, bound); rejection keeps the draw unbiased.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Exponential with mean 1, strictly positive.
  double exponential() {
    const double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double x = -std::log(u);
    return x > 0.0 ? x : 5e-324;
  }

  // Gamma(shape, 1) for positive integer shape: sum of exponentials.
  double gamma_int(int shape) {
    if (shape <= 0) throw std::invalid_argument("gamma_int: shape must be positive");
    double sum = 0.0;
    for (int i = 0; i < shape; ++i) sum += exponential();
    return sum;
  }

  double beta(int a, int b) {
    const double x = gamma_int(a);
    const double y = gamma_int(b);
    return x / (x + y);
  }

  // Random point on the n-simplex; alpha = 1 is the uniform partition.
  std::vector<double> dirichlet(std::size_t n, int alpha = 1) {
    if (n == 0) return {};
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& v : w) {
      v = gamma_int(alpha);
      total += v;
    }
    for (auto& v : w) v /= total;
    return w;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fogplace
