#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "exsieve/characters.hpp"

namespace exsieve {

// Inverse of a modulo m by the extended Euclidean algorithm.
std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m);

// r -> r^{-1} mod c for every r in [0, c); 0 where gcd(r, c) > 1.
std::vector<std::uint64_t> inverse_table(std::uint64_t c);

struct KloostermanValue {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::uint64_t c = 0;
  double value = 0.0;
  double imag_residue = 0.0;  // |Im K|, which must vanish
  double weil_envelope = 0.0;  // tau(c) sqrt(c) gcd(m, n, c)^{1/2}
};

// Precomputes inverses and the c-th roots of unity for repeated K(m, n; c).
class KloostermanEvaluator {
 public:
  explicit KloostermanEvaluator(std::uint64_t c);

  std::uint64_t modulus() const { return c_; }
  std::complex<double> complex_value(std::int64_t m, std::int64_t n) const;
  KloostermanValue operator()(std::int64_t m, std::int64_t n) const;

  const std::vector<std::uint64_t>& inverses() const { return inverses_; }
  const std::complex<double>& root(std::uint64_t k) const { return roots_[k % c_]; }

 private:
  std::uint64_t c_;
  double tau_c_;
  std::vector<std::uint64_t> units_;
  std::vector<std::uint64_t> inverses_;
  std::vector<std::complex<double>> roots_;
};

// Throws InternalConsistency if the imaginary part exceeds 1e-9.
KloostermanValue kloosterman(std::int64_t m, std::int64_t n, std::uint64_t c);

struct WeilCheck {
  double value = 0.0;
  double envelope = 0.0;
  bool ok = false;
};

WeilCheck weil_check(std::int64_t m, std::int64_t n, std::uint64_t c);
WeilCheck weil_check(const KloostermanEvaluator& eval, std::int64_t m, std::int64_t n);

// K(s, 0; q) == sum_{d | gcd(s, q)} d mu(q/d), compared after rounding.
bool ramanujan_identity_check(std::int64_t s, std::uint64_t q);

// Box and congruence data of the short double sum N(K, L).
struct NklParams {
  std::uint64_t K = 1;
  std::uint64_t L = 1;
  double delta = 0.0;
  std::uint64_t q = 1;
  std::uint64_t a = 1;
  std::uint64_t D = 1;
  std::uint64_t r = 1;
};

// Integer ranges K < k <= (1 + delta) K and L < l <= (1 + delta) L.
struct NklBox {
  std::uint64_t k_lo, k_hi, l_lo, l_hi;  // inclusive; empty if lo > hi
};
NklBox nkl_box(const NklParams& p);

// #{(k, l) in box : k l = a (mod q), k = r (mod D)}.
std::int64_t nkl_direct(const NklParams& p);
std::int64_t nkl_direct(std::uint64_t K, std::uint64_t L, double delta, std::uint64_t q, std::uint64_t a,
                        const RealPrimitiveCharacter& chi, std::uint64_t r);

struct NKLDecomposition {
  NklParams params;
  std::int64_t direct = 0;
  double M1 = 0.0;
  double M2 = 0.0;
  double E = 0.0;
  // E split: the t != q, q* !| s block of the additive-character expansion,
  // and the (s = m q*, t = q) terms shared by the M1 and M2 blocks.
  double E_offdiagonal = 0.0;
  double E_overlap = 0.0;
  double F0 = 0.0;  // F(0): count of k = r (mod D) in the k-interval
  double G0 = 0.0;  // G(0): length of the l-interval
  double residual() const { return static_cast<double>(direct) - (M1 + M2 + E); }
};

// Exact additive-character decomposition of N(K, L). Work is O(q^3 + q (K + L)/D).
// Throws InvalidArgument on gcd(a, q) != 1 or gcd(r, D) != 1, and
// InternalConsistency when |E| exceeds q * (box side)^2 or the parts fail to close.
NKLDecomposition nkl_decompose(const NklParams& p);
NKLDecomposition nkl_decompose(std::uint64_t K, std::uint64_t L, double delta, std::uint64_t q, std::uint64_t a,
                               const RealPrimitiveCharacter& chi, std::uint64_t r);

}  // namespace exsieve
