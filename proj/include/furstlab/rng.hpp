#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace furstlab {

// mt19937_64 with bounded draws defined here rather than through the
// standard distributions, whose output differs between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // k distinct indices from [0, n), returned sorted.
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and an index.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace furstlab
