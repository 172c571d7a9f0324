#include "exsieve/characters.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>

#include "exsieve/arith.hpp"
#include "exsieve/error.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

std::complex<double> unit_root(std::int64_t num, std::uint64_t den) {
  const auto D = static_cast<std::int64_t>(den);
  std::int64_t r = num % D;
  if (r < 0) r += D;
  // Fold into (-1/2, 1/2] for the best argument accuracy.
  if (2 * r > D) r -= D;
  const double t = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

int kronecker_symbol(std::int64_t a, std::int64_t b) {
  static constexpr int kTab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
  if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
  if ((a & 1) == 0 && (b & 1) == 0) return 0;
  int v = 0;
  while ((b & 1) == 0) {
    ++v;
    b /= 2;
  }
  int k = (v % 2 == 0) ? 1 : kTab2[a & 7];
  if (b < 0) {
    b = -b;
    if (a < 0) k = -k;
  }
  while (true) {
    if (a == 0) return b == 1 ? k : 0;
    v = 0;
    while ((a & 1) == 0) {
      ++v;
      a /= 2;
    }
    if (v % 2 == 1) k *= kTab2[b & 7];
    if (a & b & 2) k = -k;
    const std::int64_t r = a < 0 ? -a : a;
    a = b % r;
    b = r;
  }
}

namespace {

bool squarefree(std::uint64_t n) { return mobius(n) != 0; }

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

std::string fundamental_discriminant_defect(std::int64_t d) {
  const std::uint64_t ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
  if (ad < 3) return "|d| must be at least 3";
  const std::int64_t r4 = mod_pos(d, 4);
  if (r4 == 1) {
    if (!squarefree(ad)) return "d = 1 mod 4 but d is not squarefree";
    return {};
  }
  if (r4 == 0) {
    const std::int64_t m = d / 4;
    const std::int64_t m4 = mod_pos(m, 4);
    if (m4 != 2 && m4 != 3) return "d = 0 mod 4 but d/4 is not 2 or 3 mod 4";
    if (!squarefree(static_cast<std::uint64_t>(m < 0 ? -m : m))) return "d/4 has a square factor";
    return {};
  }
  return "d mod 4 is " + std::to_string(r4) + " (must be 0 or 1)";
}

bool is_fundamental_discriminant(std::int64_t d) { return fundamental_discriminant_defect(d).empty(); }

std::vector<std::int64_t> fundamental_discriminants(std::int64_t max_abs) {
  std::vector<std::int64_t> out;
  for (std::int64_t m = 3; m <= max_abs; ++m) {
    if (is_fundamental_discriminant(-m)) out.push_back(-m);
    if (is_fundamental_discriminant(m)) out.push_back(m);
  }
  return out;
}

RealPrimitiveCharacter build_character(std::int64_t d) {
  if (auto why = fundamental_discriminant_defect(d); !why.empty())
    throw InvalidArgument("d = " + std::to_string(d) + " is not a fundamental discriminant: " + why);
  RealPrimitiveCharacter chi;
  chi.disc_ = d;
  chi.modulus_ = static_cast<std::uint64_t>(d < 0 ? -d : d);
  const auto D = chi.modulus_;
  chi.values_.resize(D);
  for (std::uint64_t r = 0; r < D; ++r) chi.values_[r] = static_cast<std::int8_t>(kronecker_symbol(d, static_cast<std::int64_t>(r)));

  // Build-time self-checks. Failures here mean the Kronecker routine is wrong.
  const auto Di = static_cast<std::int64_t>(D);
  for (std::uint64_t r = 0; r < D; ++r) {
    const bool unit = std::gcd(r, D) == 1;
    if ((chi.values_[r] != 0) != unit)
      throw InternalConsistency("character " + std::to_string(d) + ": zero set differs from gcd(n, D) > 1 at " + std::to_string(r));
    if (kronecker_symbol(d, static_cast<std::int64_t>(r) + Di) != chi.values_[r])
      throw InternalConsistency("character " + std::to_string(d) + " is not D-periodic at " + std::to_string(r));
  }
  const std::int64_t spot = std::min<std::int64_t>(Di, 40);
  for (std::int64_t m = 1; m <= spot; ++m)
    for (std::int64_t n = 1; n <= spot; ++n)
      if (chi(m * n) != chi(m) * chi(n))
        throw InternalConsistency("character " + std::to_string(d) + " not multiplicative at (" + std::to_string(m) + "," + std::to_string(n) + ")");
  for (std::uint64_t dp : divisors(D)) {
    if (dp == D) continue;
    // Primitivity witness: a class mod D' on which chi takes both signs.
    bool witness = false;
    for (std::uint64_t c = 0; c < dp && !witness; ++c) {
      bool plus = false, minus = false;
      for (std::uint64_t n = c; n < D; n += dp) {
        plus |= chi.values_[n] == 1;
        minus |= chi.values_[n] == -1;
      }
      witness = plus && minus;
    }
    if (!witness)
      throw InternalConsistency("character " + std::to_string(d) + " is induced from modulus " + std::to_string(dp));
  }
  return chi;
}

GaussSumValue gauss_sum(const RealPrimitiveCharacter& chi) {
  CompensatedSum re, im;
  const auto D = chi.modulus();
  for (std::uint64_t r = 1; r <= D; ++r) {
    const int c = chi.at_residue(r % D);
    if (c == 0) continue;
    const auto e = unit_root(static_cast<std::int64_t>(r), D);
    re.add(c * e.real());
    im.add(c * e.imag());
  }
  return {re.value(), im.value(), chi.discriminant()};
}

RestrictedSum restricted_character_sum(const RealPrimitiveCharacter& chi, double u, std::uint64_t q) {
  if (q == 0) throw InvalidArgument("q must be positive");
  RestrictedSum out;
  const double D = static_cast<double>(chi.modulus());
  out.envelope = static_cast<double>(divisor_count(q)) * std::sqrt(D) * std::log(D);
  if (!(u >= 1.0)) return out;
  const auto U = static_cast<std::uint64_t>(std::floor(u));
  std::int64_t s = 0;
  for (std::uint64_t k = 1; k <= U; ++k)
    if (std::gcd(k, q) == 1) s += chi(static_cast<std::int64_t>(k));
  out.sum = static_cast<double>(s);
  out.ratio = std::fabs(out.sum) / out.envelope;
  return out;
}

namespace {

void check_proper_divisor(const RealPrimitiveCharacter& chi, std::uint64_t d_prime) {
  const auto D = chi.modulus();
  if (d_prime == 0 || D % d_prime != 0 || d_prime == D)
    throw InvalidArgument("D' = " + std::to_string(d_prime) + " is not a proper divisor of D = " + std::to_string(D));
}

}  // namespace

std::int64_t progression_complete_sum(const RealPrimitiveCharacter& chi, std::uint64_t d_prime, std::int64_t b) {
  check_proper_divisor(chi, d_prime);
  const auto blocks = chi.modulus() / d_prime;
  const auto Dp = static_cast<std::int64_t>(d_prime);
  std::int64_t s = 0;
  for (std::uint64_t j = 1; j <= blocks; ++j) s += chi(static_cast<std::int64_t>(j) * Dp + b);
  return s;
}

ShortSum short_progression_sum(const RealPrimitiveCharacter& chi, std::uint64_t d_prime, std::int64_t b,
                               std::uint64_t M, std::uint64_t N) {
  check_proper_divisor(chi, d_prime);
  const auto Dp = static_cast<std::int64_t>(d_prime);
  ShortSum out;
  for (std::uint64_t m = M; m < M + N; ++m) out.sum += chi(static_cast<std::int64_t>(m) * Dp + b);
  const double bound = static_cast<double>(chi.modulus() / d_prime);
  out.ratio = std::fabs(static_cast<double>(out.sum)) / bound;
  out.within_bound = static_cast<std::uint64_t>(std::llabs(out.sum)) <= chi.modulus() / d_prime;
  return out;
}

std::vector<CheckRow> character_invariant_report(const RealPrimitiveCharacter& chi) {
  std::vector<CheckRow> rows;
  const auto D = chi.modulus();

  {
    CheckRow r{"complete_multiplicativity", true, 0.0};
    for (std::int64_t m = 1; m <= 200; ++m)
      for (std::int64_t n = 1; n <= 200; ++n) {
        const double defect = std::abs(chi(m * n) - chi(m) * chi(n));
        r.max_defect = std::max(r.max_defect, defect);
      }
    r.passed = r.max_defect == 0.0;
    rows.push_back(r);
  }
  {
    std::int64_t s = 0;
    for (std::uint64_t r = 1; r <= D; ++r) s += chi.at_residue(r % D);
    rows.push_back({"orthogonality", s == 0, std::fabs(static_cast<double>(s))});
  }
  {
    CheckRow r{"zero_set_is_gcd", true, 0.0};
    for (std::uint64_t n = 0; n < D; ++n) {
      const bool unit = std::gcd(n, D) == 1;
      if ((chi.at_residue(n) != 0) != unit) r.max_defect = 1.0;
      if (unit && chi.at_residue(n) * chi.at_residue(n) != 1) r.max_defect = 1.0;
    }
    r.passed = r.max_defect == 0.0;
    rows.push_back(r);
  }
  {
    // Every proper divisor must have a witness class with both signs.
    CheckRow r{"primitivity", true, 0.0};
    for (std::uint64_t dp : divisors(D)) {
      if (dp == D) continue;
      bool witness = false;
      for (std::uint64_t c = 0; c < dp && !witness; ++c) {
        bool plus = false, minus = false;
        for (std::uint64_t n = c; n < D; n += dp) {
          plus |= chi.at_residue(n) == 1;
          minus |= chi.at_residue(n) == -1;
        }
        witness = plus && minus;
      }
      if (!witness) r.max_defect += 1.0;
    }
    r.passed = r.max_defect == 0.0;
    rows.push_back(r);
  }
  {
    const auto g = gauss_sum(chi);
    const double defect = std::fabs(g.magnitude() - std::sqrt(static_cast<double>(D)));
    rows.push_back({"gauss_sum_magnitude", defect < 1e-9, defect});
  }
  {
    CheckRow r{"complete_progression_vanishing", true, 0.0};
    CheckRow s{"short_sum_bound", true, 0.0};
    for (std::uint64_t dp : divisors(D)) {
      if (dp == D) continue;
      for (std::uint64_t b = 1; b <= D; ++b) {
        const auto v = progression_complete_sum(chi, dp, static_cast<std::int64_t>(b));
        r.max_defect = std::max(r.max_defect, std::fabs(static_cast<double>(v)));
        // Every prefix of a run longer than one period, starting at M = 1 + b % 7.
        const std::uint64_t M = 1 + b % 7, len = D / dp + 2;
        std::int64_t running = 0;
        for (std::uint64_t m = M; m < M + len; ++m) {
          running += chi(static_cast<std::int64_t>(m * dp + b));
          s.max_defect = std::max(s.max_defect, std::fabs(static_cast<double>(running)) * dp / D);
          s.passed = s.passed && static_cast<std::uint64_t>(std::llabs(running)) <= D / dp;
        }
        const auto ss = short_progression_sum(chi, dp, static_cast<std::int64_t>(b), M, len);
        s.passed = s.passed && ss.within_bound && ss.sum == running;
      }
    }
    r.passed = r.max_defect == 0.0;
    rows.push_back(r);
    rows.push_back(s);
  }
  return rows;
}

}  // namespace exsieve
