#ifndef MOBISWARM_RNG_HPP
#define MOBISWARM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mobiswarm/types.hpp"

namespace mobiswarm {

// Deterministic random stream. The mt19937_64 core sequence is fully specified
// by the standard; the distributions here are hand-rolled because the std::
// distribution adapters are implementation-defined and would break byte-stable
// replay across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

  // Stream for run `index` derived from a master seed.
  static Rng for_run(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix(master_seed) ^ mix(index * 0x9e3779b97f4a7c15ull + 1));
  }

  std::uint64_t next() { return gen_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    // rejection sampling on the top of the range keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Exponential waiting time with the given mean, rounded to whole ms
  // (minimum 1 ms so follow-up events always advance time).
  SimTime exponential_ms(SimTime mean_ms) {
    const double u = uniform01();
    const double draw = -static_cast<double>(mean_ms) * std::log1p(-u);
    const SimTime t = static_cast<SimTime>(std::llround(draw));
    return t < 1 ? 1 : t;
  }

  // Fisher-Yates shuffle (std::shuffle is implementation-defined).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  // splitmix64 finalizer, used for seed whitening.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace mobiswarm

#endif  // MOBISWARM_RNG_HPP
