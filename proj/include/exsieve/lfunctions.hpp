#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "exsieve/characters.hpp"
#include "exsieve/factor_table.hpp"

namespace exsieve {

struct LEvaluation {
  double s = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
  std::uint64_t terms = 0;
};

// sqrt(D) log D: the explicit envelope for |sum of chi(n) over an interval|.
double character_sum_envelope(const RealPrimitiveCharacter& chi);

// Partial series sum_{n <= terms} chi(n) n^{-s}, compensated. The tail is
// bounded by partial summation against the interval-sum envelope M:
// |tail| <= M * max(s, 1) * terms^{-s}.
LEvaluation l_value(const RealPrimitiveCharacter& chi, double s, std::uint64_t terms);

// Doubles `terms` (starting from max(D, start)) until value - tail_bound > 0
// or max_terms is reached. Used for positivity sweeps of L(1, chi).
LEvaluation l_one_certified(const RealPrimitiveCharacter& chi, std::uint64_t start = 1024,
                            std::uint64_t max_terms = std::uint64_t{1} << 28);

// L(1, chi) from the finite closed forms:
//   d < 0: -pi / |d|^{3/2} * sum_{r<|d|} r chi(r)
//   d > 0: -1 / sqrt(d) * sum_{r<d} chi(r) log sin(pi r / d)
double l_one_closed_form(const RealPrimitiveCharacter& chi);

struct SiegelZeroReport {
  std::optional<double> beta;  // zero closest to 1, if any sign change was found
  double eta = 0.0;            // 1 / ((1 - beta) log D) when beta is present
  double s_lo = 0.0;           // final bracket
  double s_hi = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;
  double tolerance = 0.0;
  int sign_changes = 0;
};

// Grid scan plus bisection on an arbitrary real function. log_modulus is
// log D, used only for eta.
SiegelZeroReport scan_real_zeros(const std::function<double(double)>& f, double log_modulus, double s_lo,
                                 double s_hi, int grid, double tol);

SiegelZeroReport scan_real_zeros(const RealPrimitiveCharacter& chi, double s_lo, double s_hi, int grid, double tol,
                                 std::uint64_t terms = 1'000'000);

// prod_{p <= z} (1 - chi(p)/p), accumulated in log space.
double sifted_euler_product(const RealPrimitiveCharacter& chi, double z, const FactorTable& table);

// [L(1,chi) prod_{p<=z}(1 - chi(p)/p)] / [log D / (eta log z)], for 1 < z <= D^2.
double fdp_report(const RealPrimitiveCharacter& chi, double z, double eta, const FactorTable& table);

}  // namespace exsieve
