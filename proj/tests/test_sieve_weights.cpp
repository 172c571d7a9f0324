#include <doctest.h>

#include <cmath>
#include <map>

#include "exsieve/characters.hpp"
#include "exsieve/error.hpp"
#include "exsieve/factor_table.hpp"
#include "exsieve/sieve_weights.hpp"
#include "oracles.hpp"

using namespace exsieve;

namespace {

using i128 = __int128;

i128 ipow(i128 b, int e) {
  i128 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Exact membership for integer z and even u: (p1...ph)^2 ph^u < z^{2u}, squared
// to stay in integers. primes sorted decreasing.
bool member_exact(const std::vector<std::uint64_t>& desc, int z, int u) {
  const i128 rhs = ipow(z, 2 * u);
  i128 prod = 1;
  for (std::size_t h = 1; h <= desc.size(); ++h) {
    prod *= static_cast<i128>(desc[h - 1]);
    if (h % 2 == 1 && prod * prod * ipow(static_cast<i128>(desc[h - 1]), u) >= rhs) return false;
  }
  return true;
}

// Weight map by subset enumeration over primes <= z.
std::map<std::uint64_t, int> oracle_weights(int z, int u) {
  std::vector<std::uint64_t> primes;
  for (int p = 2; p <= z; ++p)
    if (oracle::is_prime(p)) primes.push_back(p);
  std::map<std::uint64_t, int> out;
  const std::size_t k = primes.size();
  for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
    std::vector<std::uint64_t> desc;
    std::uint64_t d = 1;
    for (std::size_t i = k; i-- > 0;)
      if (mask >> i & 1) desc.push_back(primes[i]), d *= primes[i];
    if (member_exact(desc, z, u)) out[d] = desc.size() % 2 ? -1 : 1;
  }
  return out;
}

}  // namespace

TEST_CASE("w(1) = 1 and single primes at z = 10, u = 4") {
  const FactorTable t(100);
  const auto w = build_weight(10, 4, t);
  CHECK(w.weight(1) == 1);
  for (std::uint64_t p : {2, 3, 5, 7}) CHECK(w.weight(p) == -1);
  CHECK(w.weight(11) == 0);
}

TEST_CASE("105 is a member at z = 10, u = 4") {
  const std::vector<std::uint64_t> desc{7, 5, 3};
  CHECK(7 * 5 * 3 * 3 * 3 == 945);
  CHECK(beta_sieve_member(desc, 10, 4));
  CHECK(member_exact(desc, 10, 4));
  const FactorTable t(100);
  CHECK(build_weight(10, 4, t).weight(105) == -1);
}

TEST_CASE("weights match the subset-enumeration oracle") {
  const FactorTable t(1000);
  for (auto [z, u] : std::vector<std::pair<int, int>>{{10, 4}, {20, 6}, {30, 8}, {30, 4}, {30, 6}, {13, 4}, {50, 4}}) {
    const auto w = build_weight(z, u, t);
    const auto expect = oracle_weights(z, u);
    INFO("z = " << z << ", u = " << u);
    REQUIRE(w.support().size() == expect.size());
    for (std::size_t i = 0; i < w.support().size(); ++i) {
      const auto it = expect.find(w.support()[i]);
      REQUIRE(it != expect.end());
      REQUIRE(w.weights()[i] == it->second);
    }
  }
}

TEST_CASE("support and magnitude invariants") {
  const FactorTable t(1000);
  for (double z : {5.0, 10.0, 20.0, 30.0, 47.5})
    for (double u : {2.5, 3.0, 4.0, 6.0, 8.0}) {
      const auto w = build_weight(z, u, t);
      const double limit = std::pow(z, u);
      for (std::size_t i = 0; i < w.support().size(); ++i) {
        const auto d = w.support()[i];
        REQUIRE(std::abs(w.weights()[i]) == 1);
        REQUIRE(w.weights()[i] == oracle::mobius(d));
        REQUIRE(static_cast<double>(d) < limit);
        for (auto [p, e] : oracle::factor(d)) REQUIRE(static_cast<double>(p) <= z);
      }
    }
}

TEST_CASE("build_weight argument checks") {
  const FactorTable t(100);
  CHECK_THROWS_AS(build_weight(10, 2, t), InvalidArgument);
  CHECK_THROWS_AS(build_weight(1, 4, t), InvalidArgument);
  CHECK_THROWS_AS(build_weight(200, 4, t), OutOfRange);
  const FactorTable big(100000);
  CHECK_THROWS_AS(build_weight(1000, 40, big, 1000), ResourceError);
}

TEST_CASE("ties count as non-members") {
  // z = 5^{3/4}, u = 4: z^u = 125 = 5 * 5^{u/2}, an exact tie at d = 5
  const std::vector<std::uint64_t> desc{5};
  CHECK(beta_sieve_member(desc, 5, 3));   // 5^{2.5} < 5^3
  CHECK_FALSE(beta_sieve_member(desc, std::pow(5.0, 0.75), 4));
}

TEST_CASE("ZrSchedule is strictly decreasing") {
  for (double z : {5.0, 10.0, 30.0, 1e6})
    for (double u : {2.5, 4.0, 8.0, 50.0}) {
      const ZrSchedule s(z, u);
      CHECK(s(0) == doctest::Approx(z));
      for (int r = 0; r <= 60; ++r) REQUIRE(s.log_at(r + 1) < s.log_at(r));
      const int r2 = s.first_below_two();
      CHECK(s(r2) < 2.0);
      if (r2 > 0) CHECK(s(r2 - 1) >= 2.0);
    }
}

TEST_CASE("indicator defect examples") {
  const FactorTable t(100000);
  const auto w = build_weight(10, 4, t);
  const ZrSchedule sched(10, 4);
  const auto one = sieve_indicator_defect(1, w, sched, t);
  CHECK(one.indicator == 1);
  CHECK(one.convolved == 1);
  CHECK(one.defect == 0.0);
  const auto prime = sieve_indicator_defect(97, w, sched, t);
  CHECK(prime.convolved == 1);
  CHECK(prime.defect == 0.0);
  // n = 210: enumerate the 16 divisors
  int brute = 0;
  for (std::uint64_t d = 1; d <= 210; ++d)
    if (210 % d == 0) brute += w.weight(d);
  const auto r = sieve_indicator_defect(210, w, sched, t);
  CHECK(r.convolved == brute);
  CHECK(r.indicator == 0);
  CHECK(r.defect == std::fabs(static_cast<double>(brute)));
}

TEST_CASE("upper-bound property and defect bound for n <= 1e5") {
  const FactorTable t(100000);
  for (auto [z, u] : std::vector<std::pair<double, double>>{{10, 4}, {20, 6}, {30, 8}}) {
    const auto w = build_weight(z, u, t);
    const ZrSchedule sched(z, u);
    for (std::uint64_t n = 1; n <= 100000; ++n) {
      const auto r = sieve_indicator_defect(n, w, sched, t);
      REQUIRE(r.convolved >= r.indicator);
      REQUIRE(r.defect <= r.bound);
    }
  }
}

TEST_CASE("defect bound formula against a direct evaluation") {
  const FactorTable t(10000);
  const double z = 30, u = 4;
  const auto w = build_weight(z, u, t);
  const ZrSchedule sched(z, u);
  for (std::uint64_t n = 1; n <= 10000; n += 37) {
    const auto r = sieve_indicator_defect(n, w, sched, t);
    const double tau = static_cast<double>(oracle::divisor_count(n));
    const double least = n == 1 ? INFINITY : static_cast<double>(oracle::spf(n));
    double s = 0.0;
    for (int k = 2; k < 400; ++k) {  // r >= u/2 = 2, truncated far past z_r < 2
      const double zr = std::pow(z, std::pow((u - 2) / u, k));
      if (least > zr) s += std::ldexp(1.0, -k);
    }
    REQUIRE(r.bound == doctest::Approx(tau * tau * s).epsilon(1e-12));
  }
}

TEST_CASE("weighted sums") {
  const FactorTable t(1000);
  const auto w10 = build_weight(10, 50, t);
  const auto zero = weighted_sum_ratio(w10, [](std::uint64_t) { return 0.0; }, 0, 1.0);
  CHECK(zero.lhs == doctest::Approx(1.0));
  CHECK(zero.rhs == doctest::Approx(1.0));
  const auto ones = weighted_sum_ratio(w10, [](std::uint64_t) { return 1.0; }, 0, 1.5);
  CHECK(ones.rhs == doctest::Approx(4.0 / 15.0 * 6.0 / 7.0));
  CHECK(ones.rhs == doctest::Approx(0.22857).epsilon(1e-4));
  // u = 50 keeps every divisor of 210, so the sum is the full product
  CHECK(w10.support().size() == 16);
  CHECK(ones.lhs == doctest::Approx(ones.rhs).epsilon(1e-14));
  CHECK_FALSE(ones.in_asserted_regime);  // 50 < 50 * 1.5
  const auto chi = build_character(-4);
  const auto lin = weighted_sum_ratio(w10, [&](std::uint64_t p) { return static_cast<double>(chi(static_cast<std::int64_t>(p))); }, 1, 1.5);
  double lhs = 0.0, rhs = std::log(10.0);
  for (std::uint64_t d : {1, 2, 3, 5, 6, 7, 10, 14, 15, 21, 30, 35, 42, 70, 105, 210}) {
    double nu = 1.0;
    for (auto [p, e] : oracle::factor(d)) nu *= chi(static_cast<std::int64_t>(p));
    lhs += oracle::mobius(d) * nu * std::log(static_cast<double>(d)) / static_cast<double>(d);
  }
  for (double p : {2.0, 3.0, 5.0, 7.0}) rhs *= 1.0 - chi(static_cast<std::int64_t>(p)) / p;
  CHECK(lin.lhs == doctest::Approx(lhs).epsilon(1e-13));
  CHECK(lin.rhs == doctest::Approx(rhs).epsilon(1e-13));
  CHECK_FALSE(lin.in_asserted_regime);  // |nu(p)| = 1 forces B > 1, so u = 50 < 50 B: report only
  CHECK_THROWS_AS(weighted_sum_ratio(w10, [](std::uint64_t p) { return static_cast<double>(p); }, 0, 100.0),
                  InvalidArgument);
}
