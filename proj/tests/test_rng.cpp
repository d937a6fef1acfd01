#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mobiswarm/rng.hpp"

using namespace mobiswarm;

namespace {

// Independent copy of the splitmix64 finalizer used for seed whitening.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// 99th percentile of the chi-square distribution.
constexpr double kChi2_1dof_99 = 6.635;
constexpr double kChi2_3dof_99 = 11.345;
constexpr double kChi2_7dof_99 = 18.475;

double chi_square(const std::vector<std::int64_t>& observed, double expected) {
  double x = 0.0;
  for (std::int64_t o : observed) {
    const double d = static_cast<double>(o) - expected;
    x += d * d / expected;
  }
  return x;
}

}  // namespace

TEST_CASE("raw stream equals the standard engine on the whitened seed") {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull}) {
    Rng rng(seed);
    std::mt19937_64 ref(splitmix64(seed));
    for (int i = 0; i < 100; ++i) CHECK(rng.next() == ref());
  }
}

TEST_CASE("same seed replays identically, different seeds diverge") {
  Rng a(7), b(7), c(8);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next(), y = b.next(), z = c.next();
    all_equal = all_equal && (x == y);
    any_diff = any_diff || (x != z);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("per-run streams are independent of each other") {
  Rng r0 = Rng::for_run(123, 0);
  Rng r1 = Rng::for_run(123, 1);
  Rng r0_again = Rng::for_run(123, 0);
  bool diverged = false;
  for (int i = 0; i < 100; ++i) {
    const auto a = r0.next();
    diverged = diverged || (a != r1.next());
    CHECK(a == r0_again.next());
  }
  CHECK(diverged);
}

TEST_CASE("uniform stays in bounds for every bound") {
  Rng rng(99);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t bound = 1 + rng.next() % 1000;
    CHECK(rng.uniform(bound) < bound);
  }
}

TEST_CASE("uniform passes a coarse uniformity screen") {
  Rng rng(1234);
  const int n = 20000;

  std::vector<std::int64_t> c2(2, 0);
  for (int i = 0; i < n; ++i) ++c2[rng.uniform(2)];
  CHECK(chi_square(c2, n / 2.0) < kChi2_1dof_99);

  std::vector<std::int64_t> c4(4, 0);
  for (int i = 0; i < n; ++i) ++c4[rng.uniform(4)];
  CHECK(chi_square(c4, n / 4.0) < kChi2_3dof_99);

  // a bound that is not a power of two exercises the rejection path
  std::vector<std::int64_t> c8(8, 0);
  for (int i = 0; i < n; ++i) ++c8[rng.uniform(8 * 3) / 3];
  CHECK(chi_square(c8, n / 8.0) < kChi2_7dof_99);
}

TEST_CASE("uniform_range is inclusive on both ends") {
  Rng rng(5);
  bool lo_seen = false, hi_seen = false;
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t x = rng.uniform_range(-3, 3);
    CHECK(x >= -3);
    CHECK(x <= 3);
    lo_seen = lo_seen || x == -3;
    hi_seen = hi_seen || x == 3;
  }
  CHECK(lo_seen);
  CHECK(hi_seen);
}

TEST_CASE("uniform01 stays in the half-open unit interval with mean one half") {
  Rng rng(77);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  // 3 sigma for the mean of n uniform(0,1) draws: 3 / sqrt(12 n)
  CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential waits have the requested mean and never stall time") {
  Rng rng(31337);
  const int n = 100000;
  const SimTime mean = 1000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const SimTime t = rng.exponential_ms(mean);
    CHECK(t >= 1);
    sum += static_cast<double>(t);
  }
  CHECK(std::abs(sum / n - static_cast<double>(mean)) <
        0.03 * static_cast<double>(mean));
}

TEST_CASE("shuffle permutes without losing or inventing elements") {
  Rng rng(2024);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.uniform(20);
    std::vector<int> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i) * 3;
    std::vector<int> sorted = v;
    rng.shuffle(v);
    std::vector<int> after = v;
    std::sort(after.begin(), after.end());
    CHECK(after == sorted);
  }
}

TEST_CASE("shuffle places each element uniformly") {
  Rng rng(555);
  const int n = 20000;
  std::vector<std::int64_t> where(4, 0);
  for (int rep = 0; rep < n; ++rep) {
    std::vector<int> v{0, 1, 2, 3};
    rng.shuffle(v);
    for (int i = 0; i < 4; ++i)
      if (v[i] == 0) ++where[i];
  }
  CHECK(chi_square(where, n / 4.0) < kChi2_3dof_99);
}
