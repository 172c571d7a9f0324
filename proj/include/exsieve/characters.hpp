#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace exsieve {

// e(num/den) = exp(2 pi i num/den) with num reduced mod den in integers
// before any floating-point work.
std::complex<double> unit_root(std::int64_t num, std::uint64_t den);

// Kronecker symbol (d|n) by the binary reciprocity reduction.
int kronecker_symbol(std::int64_t d, std::int64_t n);

// Empty string when d is a fundamental discriminant, otherwise the failed
// condition.
std::string fundamental_discriminant_defect(std::int64_t d);
bool is_fundamental_discriminant(std::int64_t d);
// All fundamental d with 3 <= |d| <= max_abs, ordered by |d| then sign (negative first).
std::vector<std::int64_t> fundamental_discriminants(std::int64_t max_abs);

// Real primitive character n -> (d|n) modulo D = |d|, d fundamental.
class RealPrimitiveCharacter {
 public:
  std::int64_t discriminant() const { return disc_; }
  std::uint64_t modulus() const { return modulus_; }

  int operator()(std::int64_t n) const {
    const std::int64_t D = static_cast<std::int64_t>(modulus_);
    std::int64_t r = n % D;
    if (r < 0) r += D;
    return values_[static_cast<std::size_t>(r)];
  }
  int at_residue(std::uint64_t r) const { return values_[r]; }

  std::span<const std::int8_t> values() const { return values_; }

 private:
  friend RealPrimitiveCharacter build_character(std::int64_t d);
  std::int64_t disc_ = 0;
  std::uint64_t modulus_ = 0;
  std::vector<std::int8_t> values_;
};

// Builds and self-checks the character (multiplicativity spot-check,
// periodicity, exhaustive primitivity). Throws InvalidArgument naming the
// failed condition for non-fundamental d.
RealPrimitiveCharacter build_character(std::int64_t d);

struct GaussSumValue {
  double re = 0.0;
  double im = 0.0;
  std::int64_t discriminant = 0;
  double magnitude() const { return std::hypot(re, im); }
};

GaussSumValue gauss_sum(const RealPrimitiveCharacter& chi);

struct RestrictedSum {
  double sum = 0.0;
  double envelope = 0.0;  // tau(q) sqrt(D) log D
  double ratio = 0.0;     // |sum| / envelope
};

// Sum of chi(k) over k <= u with gcd(k, q) = 1.
RestrictedSum restricted_character_sum(const RealPrimitiveCharacter& chi, double u, std::uint64_t q);

// Sum of chi(j D' + b) over j = 1..D/D'. Exactly an integer; zero for
// every proper divisor D' of D.
std::int64_t progression_complete_sum(const RealPrimitiveCharacter& chi, std::uint64_t d_prime, std::int64_t b);

struct ShortSum {
  std::int64_t sum = 0;
  double ratio = 0.0;  // |sum| D' / D
  bool within_bound = false;  // |sum| <= D / D'
};

// Sum of chi(m D' + b) over M <= m < M + N.
ShortSum short_progression_sum(const RealPrimitiveCharacter& chi, std::uint64_t d_prime, std::int64_t b,
                               std::uint64_t M, std::uint64_t N);

struct CheckRow {
  std::string name;
  bool passed = false;
  double max_defect = 0.0;
};

// Every character invariant evaluated on its full period (and m, n <= 200
// for multiplicativity).
std::vector<CheckRow> character_invariant_report(const RealPrimitiveCharacter& chi);

}  // namespace exsieve
