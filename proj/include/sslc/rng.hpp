#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sslc {

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// base seed so that replication r of a sweep draws the same numbers no
// matter which thread runs it.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  labeled = 0x4c41424cULL,
  unlabeled = 0x554e4c42ULL,
  probe = 0x50524f42ULL,
};

/// Seed for replication `rep` of stream `s`: seed ^ rep, then mixed per stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep,
                                    Stream s) noexcept {
  return splitmix64(splitmix64(seed ^ rep) ^ static_cast<std::uint64_t>(s));
}

// Thin wrapper over mt19937_64. Uniform and normal draws are computed here
// rather than with <random> distributions, whose output is
// implementation-defined, so that files are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Marsaglia polar method; the spare value is discarded to keep the
  // stream position a pure function of the call count.
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sslc
