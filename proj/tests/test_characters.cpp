#include <doctest.h>

#include <cmath>
#include <random>

#include "exsieve/arith.hpp"
#include "exsieve/characters.hpp"
#include "exsieve/error.hpp"
#include "oracles.hpp"

using namespace exsieve;

namespace {

bool squarefree(std::uint64_t n) { return oracle::mobius(n) != 0; }

// Fundamental: d = 1 (4) squarefree, or d = 4m with m = 2, 3 (4) squarefree.
bool fundamental_oracle(std::int64_t d) {
  if (d == 0 || d == 1) return false;
  const auto a = static_cast<std::uint64_t>(std::llabs(d));
  const auto m4 = ((d % 4) + 4) % 4;
  if (m4 == 1) return squarefree(a);
  if (m4 != 0) return false;
  const std::int64_t m = d / 4;
  const auto mm4 = ((m % 4) + 4) % 4;
  return (mm4 == 2 || mm4 == 3) && squarefree(a / 4);
}

}  // namespace

TEST_CASE("Kronecker symbol examples") {
  CHECK(kronecker_symbol(5, 2) == -1);
  CHECK(oracle::legendre(2, 5) == -1);
  for (std::int64_t d : {-7, -4, -3, 5, 8, 12, 13, 1000})
    CHECK(kronecker_symbol(d, 1) == 1);
  CHECK(kronecker_symbol(-4, 3) == -1);
}

TEST_CASE("Kronecker symbol agrees with the factorization definition") {
  for (std::int64_t d = -300; d <= 300; ++d) {
    if (d == 0) continue;
    const auto m4 = ((d % 4) + 4) % 4;
    if (m4 == 2 || m4 == 3) continue;  // discriminants only
    for (std::uint64_t n = 1; n <= 400; ++n)
      REQUIRE(kronecker_symbol(d, static_cast<std::int64_t>(n)) == oracle::kronecker(d, n));
  }
}

TEST_CASE("fundamental discriminant classification") {
  for (std::int64_t d = -2000; d <= 2000; ++d) REQUIRE(is_fundamental_discriminant(d) == fundamental_oracle(d));
  CHECK(is_fundamental_discriminant(12));
  CHECK_FALSE(fundamental_discriminant_defect(-16).empty());
  CHECK_FALSE(fundamental_discriminant_defect(2).empty());
  CHECK_FALSE(fundamental_discriminant_defect(45).empty());
  const auto list = fundamental_discriminants(12);
  CHECK(list == std::vector<std::int64_t>{-3, -4, 5, -7, -8, 8, -11, 12});
}

TEST_CASE("build_character examples") {
  const auto c4 = build_character(-4);
  CHECK(c4.modulus() == 4);
  CHECK(std::vector<int>(c4.values().begin(), c4.values().end()) == std::vector<int>{0, 1, 0, -1});
  const auto c3 = build_character(-3);
  CHECK(c3(1) == 1);
  CHECK(c3(2) == -1);
  const auto c12 = build_character(12);
  CHECK(c12(5) == -1);
  CHECK(oracle::legendre(12, 5) == -1);
}

TEST_CASE("non-fundamental discriminants are rejected with a reason") {
  for (std::int64_t d : {0, 1, 2, -1, 4, -16, 9, 18, 45, 7}) {
    try {
      build_character(d);
      FAIL("accepted " << d);
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).size() > 10);
    }
  }
}

TEST_CASE("character invariants for all fundamental |d| <= 500") {
  for (auto d : fundamental_discriminants(500)) {
    const auto chi = build_character(d);
    const auto D = static_cast<std::int64_t>(chi.modulus());
    int total = 0;
    for (std::int64_t r = 1; r <= D; ++r) {
      total += chi(r);
      REQUIRE((chi(r) == 0) == (std::gcd(static_cast<std::uint64_t>(r), chi.modulus()) > 1));
      REQUIRE(chi(r) == chi(r + D));
      REQUIRE(chi(r) * chi(r) == (chi(r) == 0 ? 0 : 1));
    }
    REQUIRE(total == 0);
    for (std::int64_t m = 1; m <= 200; m += 7)
      for (std::int64_t n = 1; n <= 200; ++n) REQUIRE(chi(m * n) == chi(m) * chi(n));
    for (const auto& row : character_invariant_report(chi)) {
      INFO("d = " << d << " check " << row.name);
      REQUIRE(row.passed);
    }
  }
}

TEST_CASE("primitivity witness exists for every proper divisor") {
  for (auto d : fundamental_discriminants(200)) {
    const auto chi = build_character(d);
    const auto D = chi.modulus();
    for (auto dp : divisors(D)) {
      if (dp == D) continue;
      bool witness = false;
      for (std::uint64_t n1 = 1; n1 <= D && !witness; ++n1)
        for (std::uint64_t n2 = n1 + dp; n2 <= D + n1 && !witness; n2 += dp)
          if (std::gcd(n1 * n2, D) == 1 && chi(static_cast<std::int64_t>(n1)) != chi(static_cast<std::int64_t>(n2)))
            witness = true;
      INFO("d = " << d << ", D' = " << dp);
      REQUIRE(witness);
    }
  }
}

TEST_CASE("Gauss sums") {
  const auto g4 = gauss_sum(build_character(-4));
  // 2i: e(1/4) - e(3/4)
  const auto direct = oracle::e(0.25) - oracle::e(0.75);
  CHECK(g4.re == doctest::Approx(direct.real()).epsilon(1e-12));
  CHECK(std::fabs(g4.re) < 1e-12);
  CHECK(g4.im == doctest::Approx(2.0));
  CHECK(g4.magnitude() == doctest::Approx(2.0));
  const auto c5 = build_character(5);
  std::complex<double> s5 = 0;
  for (int r = 1; r <= 5; ++r) s5 += static_cast<double>(c5(r)) * oracle::e(r / 5.0);
  CHECK(gauss_sum(c5).magnitude() == doctest::Approx(std::abs(s5)));
  CHECK(gauss_sum(c5).magnitude() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  for (auto d : fundamental_discriminants(1000)) {
    const auto g = gauss_sum(build_character(d));
    REQUIRE(std::fabs(g.magnitude() - std::sqrt(static_cast<double>(std::llabs(d)))) < 1e-9);
  }
}

TEST_CASE("Gauss sum is sqrt(d) for d > 0 and i sqrt(|d|) for d < 0") {
  for (auto d : fundamental_discriminants(300)) {
    const auto g = gauss_sum(build_character(d));
    const double root = std::sqrt(static_cast<double>(std::llabs(d)));
    if (d > 0) {
      CHECK(g.re == doctest::Approx(root));
      CHECK(std::fabs(g.im) < 1e-9);
    } else {
      CHECK(g.im == doctest::Approx(root));
      CHECK(std::fabs(g.re) < 1e-9);
    }
  }
}

TEST_CASE("restricted character sums") {
  const auto c4 = build_character(-4);
  CHECK(restricted_character_sum(c4, 0.5, 1).sum == 0.0);
  CHECK(restricted_character_sum(c4, 8, 1).sum == 0.0);
  CHECK(restricted_character_sum(c4, 5, 3).sum == 2.0);
  const auto r = restricted_character_sum(build_character(-163), 1000, 6);
  CHECK(r.envelope == doctest::Approx(4 * std::sqrt(163.0) * std::log(163.0)));
  CHECK(r.ratio == doctest::Approx(std::fabs(r.sum) / r.envelope));
}

TEST_CASE("complete progression sums vanish") {
  const auto c4 = build_character(-4);
  CHECK(progression_complete_sum(c4, 2, 1) == 0);
  CHECK(c4(3) + c4(5) == 0);
  const auto c12 = build_character(12);
  CHECK(progression_complete_sum(c12, 4, 1) == 0);
  CHECK(c12(5) == -1);
  CHECK(c12(9) == 0);
  CHECK(c12(13) == 1);
  CHECK_THROWS_AS(progression_complete_sum(c12, 5, 1), InvalidArgument);
  CHECK_THROWS_AS(progression_complete_sum(c12, 12, 1), InvalidArgument);
}

TEST_CASE("short progression sums") {
  const auto c12 = build_character(12);
  CHECK(short_progression_sum(c12, 4, 1, 1, 2).sum == -1);
  CHECK(short_progression_sum(c12, 4, 1, 7, 3).sum == 0);
  std::mt19937_64 rng(11);
  for (auto d : fundamental_discriminants(500)) {
    const auto chi = build_character(d);
    for (auto dp : divisors(chi.modulus())) {
      if (dp == chi.modulus()) continue;
      for (int t = 0; t < 50; ++t) {
        const auto M = 1 + rng() % 1000;
        const auto N = 1 + rng() % 1000;
        const auto b = static_cast<std::int64_t>(rng() % 1000) - 500;
        const auto s = short_progression_sum(chi, dp, b, M, N);
        REQUIRE(static_cast<std::uint64_t>(std::llabs(s.sum)) <= chi.modulus() / dp);
        REQUIRE(s.within_bound);
      }
    }
  }
}

TEST_CASE("unit roots reduce exactly") {
  const auto a = unit_root(1, 4);
  CHECK(std::fabs(a.real()) < 1e-16);
  CHECK(a.imag() == 1.0);
  const auto b = unit_root(-1'000'000'000'001, 4);
  CHECK(std::abs(b - std::complex<double>(0, -1)) < 1e-15);  // -10^12 - 1 = 3 (mod 4)
}
