#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>

#include "exsieve/arith.hpp"
#include "exsieve/characters.hpp"
#include "exsieve/factor_table.hpp"
#include "exsieve/sieve_weights.hpp"

namespace exsieve {

inline constexpr double kDefaultEpsilon = 0.005;

// lambda = 1 * chi and lambda' = chi * log, by divisor loops up to N.
ArithSequence lambda_table(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table);
ArithSequence lambdaprime_table(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table);

// max_{n <= N} |lambda'(n) - Lambda(n) - sum_{kl = n, k > 1} lambda(k) Lambda(l)|,
// both sides from separately built tables.
double verify_lL_identity(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table);

// Shared read-only state for one (table, chi, N): Lambda, lambda, lambda'
// and L(1, chi). Holds references; table and chi must outlive it.
class ProgressionContext {
 public:
  ProgressionContext(const FactorTable& table, const RealPrimitiveCharacter& chi, std::uint64_t N);

  const FactorTable& table() const { return table_; }
  const RealPrimitiveCharacter& chi() const { return chi_; }
  std::uint64_t limit() const { return N_; }
  const ArithSequence& von_mangoldt() const { return Lambda_; }
  const ArithSequence& lambda() const { return lambda_; }
  const ArithSequence& lambda_prime() const { return lambda_prime_; }
  double l_one() const { return l_one_; }

  // X = floor(x), checked against the context limit.
  std::uint64_t floor_x(double x) const;

 private:
  const FactorTable& table_;
  const RealPrimitiveCharacter& chi_;
  std::uint64_t N_;
  ArithSequence Lambda_;
  ArithSequence lambda_;
  ArithSequence lambda_prime_;
  double l_one_;
};

// prod_{p | q} (1 - chi(p)/p)
double euler_factor_over(const RealPrimitiveCharacter& chi, std::uint64_t q);
// 1 - 1_{D | q} chi(a)
double main_term_indicator(const RealPrimitiveCharacter& chi, std::uint64_t q, std::uint64_t a);

struct HyperbolaEstimate {
  double direct = 0.0;
  double main_term = 0.0;
  double error = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
  bool in_asserted_regime = true;
};

// sum_{n <= x, (n, q) = 1} lambda(n) against x phi(q)/q prod_{p|q}(1 - chi(p)/p) L(1, chi);
// envelope tau(q) x^{1/2} D^{1/2 + eps}.
HyperbolaEstimate lambda_sum_coprime(const ProgressionContext& ctx, double x, std::uint64_t q, double eps = 0.01);

// sum_{n <= x, n = a (q)} lambda(n) against x (1 + 1_{D|q} chi(a))/q prod(...) L(1, chi);
// envelope D x^{1 - eps/2}/q. Regime: q <= x^{2/3 - eps}.
HyperbolaEstimate lambda_sum_progression(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a,
                                         double eps = kDefaultEpsilon);

struct LambdaPrimeReport {
  double progression = 0.0;
  double coprime = 0.0;
  double main_term = 0.0;       // (1 - 1_{D|q} chi(a))/phi(q) * coprime
  double secondary_term = 0.0;  // 1_{D|q} chi(a)/q (x log x - x) prod(...) L(1, chi)
  double residual = 0.0;
  double envelope = 0.0;        // x^{1/2+eps} D^{1/2+eps} / q^{1/4}
  double ratio = 0.0;
  bool in_asserted_regime = true;  // x > q D
};

LambdaPrimeReport lambdaprime_sum_progression(const ProgressionContext& ctx, double x, std::uint64_t q,
                                              std::uint64_t a, double eps = kDefaultEpsilon);

struct CompaReport {
  double difference = 0.0;
  double envelope = 0.0;  // D x^{1 - eps/6} / q
  bool in_asserted_regime = true;  // q <= x^{58/115 - eps}
};

// sum_{kl <= x, kl = a (q)} lambda(k) - (1/phi(q)) sum_{kl <= x, (kl, q) = 1} lambda(k), by double loops.
CompaReport compa_difference(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a,
                             double eps = kDefaultEpsilon);

struct PartitionDefects {
  double von_mangoldt = 0.0;  // relative defects
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double max() const { return std::max(von_mangoldt, std::max(lambda, lambda_prime)); }
};

// Sums the progression sums over every reduced residue a mod q and compares
// against the coprime sums.
PartitionDefects partition_identity_defects(const ProgressionContext& ctx, double x, std::uint64_t q);

enum class SizeBound { Unit, Log };  // |f(n)| <= 1, resp. |f(n)| <= log n

struct BoundedSequence {
  ArithSequence values;
  SizeBound bound;
};

struct TripleConvolution {
  double direct = 0.0;
  double expanded = 0.0;
  double envelope = 0.0;  // e^{-u/15} (x/phi(q)) (log x / log z)^{12}
};

// direct: sum over n <= x, n = a (q), P^-(n) > z of (f1 * f2 * f3)(n).
// expanded: the weighted triple sum over d1, d2, d3 in supp(w) coprime to q,
// with k l m <= x/(d1 d2 d3) and k l m = a (d1 d2 d3)^{-1} (q).
TripleConvolution sifted_triple_convolution(double x, std::uint64_t q, std::uint64_t a, const BoundedSequence& f1,
                                            const BoundedSequence& f2, const BoundedSequence& f3,
                                            const BetaSieveWeight& w, const FactorTable& table);

struct JokaReport {
  double value = 0.0;
  double envelope = 0.0;  // V^3/eta + exp(-c sqrt(V log eta)), V = log x / log z
  double V = 0.0;
};

// sum over z < n <= x with P^-(n) > z of lambda(n)/n.
JokaReport joka_sum(const ProgressionContext& ctx, double x, double z, double eta, double c);

struct DecompositionReport {
  double x = 0.0;
  std::uint64_t q = 0;
  std::uint64_t a = 0;
  double z = 0.0;
  std::int64_t disc = 0;
  double psi_prog = 0.0;
  double psi_total = 0.0;
  double indicator = 0.0;  // 1 - 1_{D|q} chi(a)
  double main = 0.0;       // psi(x)/phi(q) * indicator
  double Delta = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double small_prime_prog = 0.0;      // Lambda over n = a (q), P^-(n) <= z
  double small_prime_coprime = 0.0;   // psi(x) minus Lambda over (n, q) = 1, P^-(n) > z
  double correction = 0.0;
  double lhs_minus_rhs = 0.0;
  double closure_tolerance() const;
};

// Every term by its own loop, then the closure
//   psi(x;q,a) - main = Delta + indicator/phi(q) S1 - S2 + correction.
DecompositionReport decomposition_pipeline(const ProgressionContext& ctx, double x, std::uint64_t q,
                                           std::uint64_t a, double z);

struct Schedule {
  double z = 0.0;
  double log_z = 0.0;
  double u = 0.0;
  double V = 0.0;  // log x / log D
};

// z = D^{min(sqrt(V/log eta), 2)}, u = eps V / (200 min(...)). Throws
// OutOfDomain naming the violated hypothesis (V >= 200/eps, eta > 1,
// eps in (0, 1/100), D >= 2).
Schedule parameter_schedule(double x, std::uint64_t D, double eta, double eps);
// Same formulas without the range hypotheses (still requires eta > 1, D >= 2, x > 1).
Schedule schedule_unchecked(double x, std::uint64_t D, double eta, double eps);

struct EquidistributionReport {
  DecompositionReport decomposition;
  double measured = 0.0;  // |psi(x;q,a) phi(q)/psi(x) - (1 - 1_{D|q} chi(a))|
  double envelope = 0.0;  // V^16/eta + exp(-C sqrt(V log eta)), V = log x/log D
  double ratio = 0.0;
};

EquidistributionReport equidistribution_error_report(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a,
                                     double z, double eta, double C_eps);
double equidistribution_envelope(double V, double eta, double C_eps);

}  // namespace exsieve
