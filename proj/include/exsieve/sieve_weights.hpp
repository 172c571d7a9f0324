#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "exsieve/factor_table.hpp"

namespace exsieve {

// z_r = z^{((u-2)/u)^r}, strictly decreasing to 1.
class ZrSchedule {
 public:
  ZrSchedule(double z, double u);

  double z() const { return z_; }
  double u() const { return u_; }
  double operator()(int r) const;
  double log_at(int r) const;
  // Smallest r >= 0 with z_r < 2.
  int first_below_two() const;

 private:
  double z_;
  double u_;
};

// Upper-bound beta-sieve membership. primes_desc lists the prime factors of
// d in strictly decreasing order; d is in the support set iff
// p_1...p_h * p_h^{u/2} < z^u for every odd h <= k. Comparison is done in
// log space; near-ties (within 1e-12 relative) count as non-members.
bool beta_sieve_member(std::span<const std::uint64_t> primes_desc, double z, double u);

// w(d) = mu(d) 1_D(d) on squarefree d | P(z).
class BetaSieveWeight {
 public:
  double z() const { return z_; }
  double u() const { return u_; }
  double log_support_limit() const { return u_ * std::log(z_); }

  // 0 outside the support.
  int weight(std::uint64_t d) const;
  bool in_support(std::uint64_t d) const { return weight(d) != 0; }

  std::span<const std::uint64_t> support() const { return support_; }
  std::span<const std::int8_t> weights() const { return weights_; }
  std::span<const std::uint64_t> sifting_primes() const { return primes_; }

  // sum_{d | n} w(d), using the prime factors of n that are <= z.
  int convolve_with_one(std::span<const std::uint64_t> small_primes_of_n) const;

 private:
  friend BetaSieveWeight build_weight(double z, double u, const FactorTable& table, std::size_t max_support);
  double z_ = 0.0;
  double u_ = 0.0;
  std::vector<std::uint64_t> primes_;   // primes <= z, increasing
  std::vector<std::uint64_t> support_;  // sorted
  std::vector<std::int8_t> weights_;    // parallel to support_
};

// Enumerates the support by depth-first search over primes <= z (descending),
// pruning at the first violated odd-index condition. Throws InvalidArgument for
// u <= 2 or z <= 1, OutOfRange if z exceeds the table, and ResourceError when
// the support would exceed max_support entries or 2^62.
BetaSieveWeight build_weight(double z, double u, const FactorTable& table,
                             std::size_t max_support = std::size_t{1} << 24);

struct SieveDefect {
  int indicator = 0;   // 1 if P^-(n) > z
  int convolved = 0;   // (1 * w)(n)
  double defect = 0.0;
  double bound = 0.0;  // tau(n)^2 * sum_{r >= u/2} 1_{P^-(n) > z_r} 2^{-r}
};

SieveDefect sieve_indicator_defect(std::uint64_t n, const BetaSieveWeight& w, const ZrSchedule& schedule,
                                   const FactorTable& table);

struct WeightedSumRatio {
  double lhs = 0.0;
  double rhs = 0.0;
  bool in_asserted_regime = false;  // u >= 50 B
};

// lhs = sum_{d | P(z)} w(d) nu(d) (log d)^j / d, rhs = (log z)^j prod_{p<=z} (1 - nu(p)/p).
// nu is multiplicative, given by its prime values; |nu(p)| < min(B, p) is enforced.
WeightedSumRatio weighted_sum_ratio(const BetaSieveWeight& w, const std::function<double(std::uint64_t)>& nu_prime,
                                    int j, double B);

}  // namespace exsieve
