#include "exsieve/kloosterman.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "exsieve/arith.hpp"
#include "exsieve/error.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m) {
  if (m == 0) return std::nullopt;
  if (m == 1) return 0;
  std::int64_t old_r = static_cast<std::int64_t>(a % m), r = static_cast<std::int64_t>(m);
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t quot = old_r / r;
    std::int64_t t = old_r - quot * r;
    old_r = r;
    r = t;
    t = old_s - quot * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) return std::nullopt;
  const auto mi = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((old_s % mi) + mi) % mi);
}

std::vector<std::uint64_t> inverse_table(std::uint64_t c) {
  std::vector<std::uint64_t> inv(c, 0);
  for (std::uint64_t r = 0; r < c; ++r)
    if (auto v = mod_inverse(r, c)) inv[r] = *v;
  if (c == 1) inv[0] = 0;
  return inv;
}

namespace {

std::uint64_t mod_signed(std::int64_t v, std::uint64_t c) {
  const auto ci = static_cast<std::int64_t>(c);
  std::int64_t r = v % ci;
  return static_cast<std::uint64_t>(r < 0 ? r + ci : r);
}

std::uint64_t abs_u(std::int64_t v) { return static_cast<std::uint64_t>(v < 0 ? -v : v); }

}  // namespace

KloostermanEvaluator::KloostermanEvaluator(std::uint64_t c) : c_(c) {
  if (c == 0) throw InvalidArgument("Kloosterman modulus must be positive");
  tau_c_ = static_cast<double>(divisor_count(c));
  inverses_ = inverse_table(c);
  // r runs over 1..c; residue 0 is the unit only for c = 1 (r = c).
  for (std::uint64_t r = 1; r <= c; ++r)
    if (std::gcd(r, c) == 1) units_.push_back(r % c);
  roots_.reserve(c);
  for (std::uint64_t k = 0; k < c; ++k) roots_.push_back(unit_root(static_cast<std::int64_t>(k), c));
}

std::complex<double> KloostermanEvaluator::complex_value(std::int64_t m, std::int64_t n) const {
  const std::uint64_t mm = mod_signed(m, c_), nn = mod_signed(n, c_);
  CompensatedSum re, im;
  for (std::uint64_t r : units_) {
    const std::uint64_t k = (mm * r + nn * inverses_[r]) % c_;
    re.add(roots_[k].real());
    im.add(roots_[k].imag());
  }
  return {re.value(), im.value()};
}

KloostermanValue KloostermanEvaluator::operator()(std::int64_t m, std::int64_t n) const {
  const auto z = complex_value(m, n);
  KloostermanValue out;
  out.m = m;
  out.n = n;
  out.c = c_;
  out.value = z.real();
  out.imag_residue = std::fabs(z.imag());
  const std::uint64_t g = std::gcd(std::gcd(abs_u(m), abs_u(n)), c_);
  out.weil_envelope = tau_c_ * std::sqrt(static_cast<double>(c_)) * std::sqrt(static_cast<double>(g));
  return out;
}

KloostermanValue kloosterman(std::int64_t m, std::int64_t n, std::uint64_t c) {
  auto v = KloostermanEvaluator(c)(m, n);
  if (v.imag_residue > 1e-9)
    throw InternalConsistency("K(" + std::to_string(m) + "," + std::to_string(n) + ";" + std::to_string(c) +
                              ") has imaginary part " + std::to_string(v.imag_residue));
  return v;
}

WeilCheck weil_check(const KloostermanEvaluator& eval, std::int64_t m, std::int64_t n) {
  const auto v = eval(m, n);
  return {v.value, v.weil_envelope, std::fabs(v.value) <= v.weil_envelope + 1e-6};
}

WeilCheck weil_check(std::int64_t m, std::int64_t n, std::uint64_t c) {
  return weil_check(KloostermanEvaluator(c), m, n);
}

bool ramanujan_identity_check(std::int64_t s, std::uint64_t q) {
  if (q == 0) throw InvalidArgument("q must be positive");
  const double k = kloosterman(s, 0, q).value;
  const std::uint64_t g = std::gcd(abs_u(s), q);
  std::int64_t expected = 0;
  for (std::uint64_t d : divisors(g)) expected += static_cast<std::int64_t>(d) * mobius(q / d);
  return std::llround(k) == expected && std::fabs(k - static_cast<double>(expected)) < 1e-6;
}

NklBox nkl_box(const NklParams& p) {
  const auto hi = [&](std::uint64_t X) {
    return static_cast<std::uint64_t>(std::floor((1.0 + p.delta) * static_cast<double>(X)));
  };
  return {p.K + 1, hi(p.K), p.L + 1, hi(p.L)};
}

namespace {

void check_nkl(const NklParams& p) {
  if (p.q == 0 || p.D == 0 || p.K == 0 || p.L == 0) throw InvalidArgument("N(K,L) needs positive K, L, q, D");
  if (!(p.delta > 0.0 && p.delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
  if (std::gcd(p.a, p.q) != 1) throw InvalidArgument("gcd(a, q) != 1");
  if (std::gcd(p.r, p.D) != 1) throw InvalidArgument("gcd(r, D) != 1");
}

NklParams with_character(std::uint64_t K, std::uint64_t L, double delta, std::uint64_t q, std::uint64_t a,
                         const RealPrimitiveCharacter& chi, std::uint64_t r) {
  return {K, L, delta, q, a, chi.modulus(), r};
}

}  // namespace

std::int64_t nkl_direct(const NklParams& p) {
  check_nkl(p);
  const auto box = nkl_box(p);
  std::int64_t count = 0;
  for (std::uint64_t k = box.k_lo; k <= box.k_hi; ++k) {
    if (k % p.D != p.r % p.D) continue;
    for (std::uint64_t l = box.l_lo; l <= box.l_hi; ++l)
      if ((k % p.q) * (l % p.q) % p.q == p.a % p.q) ++count;
  }
  return count;
}

std::int64_t nkl_direct(std::uint64_t K, std::uint64_t L, double delta, std::uint64_t q, std::uint64_t a,
                        const RealPrimitiveCharacter& chi, std::uint64_t r) {
  return nkl_direct(with_character(K, L, delta, q, a, chi, r));
}

NKLDecomposition nkl_decompose(const NklParams& p) {
  check_nkl(p);
  NKLDecomposition out;
  out.params = p;
  out.direct = nkl_direct(p);

  const auto box = nkl_box(p);
  const std::uint64_t q = p.q, D = p.D;
  const std::uint64_t g = std::gcd(D, q);
  const std::uint64_t q_star = q / g;
  const auto qd = static_cast<double>(q);

  // M1 and M2 in their closed counting forms.
  std::uint64_t k_count = 0, k_coprime = 0;
  for (std::uint64_t k = box.k_lo; k <= box.k_hi; ++k) {
    if (k % D != p.r % D) continue;
    ++k_count;
    if (std::gcd(k, q) == 1) ++k_coprime;
  }
  const std::uint64_t l_count = box.l_hi >= box.l_lo ? box.l_hi - box.l_lo + 1 : 0;
  out.M1 = static_cast<double>(k_coprime * l_count) / qd;

  std::uint64_t m2_count = 0;
  for (std::uint64_t k = box.k_lo; k <= box.k_hi; ++k) {
    if (k % D != p.r % D) continue;
    for (std::uint64_t l = box.l_lo; l <= box.l_hi; ++l)
      if (std::gcd(l, q) == 1 && (k % g) * (l % g) % g == p.a % g) ++m2_count;
  }
  out.M2 = static_cast<double>(g) * static_cast<double>(m2_count) / qd;

  // F(s) over k' with (K - r)/D < k' <= ((1 + delta) K - r)/D, i.e. k = r + k' D in the box.
  const auto r_i = static_cast<std::int64_t>(p.r);
  const auto D_i = static_cast<std::int64_t>(D);
  auto floor_div = [](std::int64_t a, std::int64_t b) {
    std::int64_t d = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
    return d;
  };
  const std::int64_t kp_lo = floor_div(static_cast<std::int64_t>(box.k_lo) - r_i - 1, D_i) + 1;
  const std::int64_t kp_hi = floor_div(static_cast<std::int64_t>(box.k_hi) - r_i, D_i);

  KloostermanEvaluator kl(q);
  std::vector<std::complex<double>> F(q + 1), G(q + 1);
  for (std::uint64_t s = 0; s <= q; ++s) {
    CompensatedSum re, im;
    for (std::int64_t kp = kp_lo; kp <= kp_hi; ++kp) {
      const auto e = kl.root(mod_signed(-kp * static_cast<std::int64_t>(s * D), q));
      re.add(e.real());
      im.add(e.imag());
    }
    F[s] = {re.value(), im.value()};
  }
  for (std::uint64_t t = 0; t <= q; ++t) {
    CompensatedSum re, im;
    for (std::uint64_t l = box.l_lo; l <= box.l_hi; ++l) {
      const auto e = kl.root(mod_signed(-static_cast<std::int64_t>(l * t % q), q));
      re.add(e.real());
      im.add(e.imag());
    }
    G[t] = {re.value(), im.value()};
  }
  out.F0 = F[0].real();
  out.G0 = G[0].real();
  if (std::llround(out.F0) != static_cast<std::int64_t>(k_count) || std::llround(out.G0) != static_cast<std::int64_t>(l_count))
    throw InternalConsistency("F(0)/G(0) disagree with the interval counts");

  // Off-diagonal block: s not a multiple of q*, 0 < t < q.
  CompensatedSum e_re, e_im;
  for (std::uint64_t s = 1; s <= q; ++s) {
    if (s % q_star == 0) continue;
    const auto phase = kl.root(mod_signed(-static_cast<std::int64_t>(s * p.r % q), q));
    const auto fs = phase * F[s];
    for (std::uint64_t t = 1; t < q; ++t) {
      const auto term = kl.complex_value(static_cast<std::int64_t>(s), static_cast<std::int64_t>(p.a * t % q)) * fs * G[t];
      e_re.add(term.real());
      e_im.add(term.imag());
    }
  }
  const double q2 = qd * qd;
  out.E_offdiagonal = e_re.value() / q2;
  const double e_imag = e_im.value() / q2;

  // Shared corner: s = m q*, t = q. Counted once in each main block.
  CompensatedSum o_re, o_im;
  for (std::uint64_t m = 1; m <= g; ++m) {
    const std::uint64_t s = m * q_star;
    const auto phase = kl.root(mod_signed(-static_cast<std::int64_t>(s * p.r % q), q));
    const auto term = kl.complex_value(static_cast<std::int64_t>(s), 0) * phase * F[0] * G[0];
    o_re.add(term.real());
    o_im.add(term.imag());
  }
  out.E_overlap = o_re.value() / q2;
  out.E = out.E_offdiagonal - out.E_overlap;

  const double side = static_cast<double>(std::max(k_count, l_count)) + 1.0;
  if (!std::isfinite(out.E) || std::fabs(out.E) > qd * side * side)
    throw InternalConsistency("E accumulation blew up: |E| = " + std::to_string(std::fabs(out.E)));
  if (std::fabs(e_imag) > 1e-6 || std::fabs(o_im.value() / q2) > 1e-6)
    throw InternalConsistency("E has a non-vanishing imaginary part");
  return out;
}

NKLDecomposition nkl_decompose(std::uint64_t K, std::uint64_t L, double delta, std::uint64_t q, std::uint64_t a,
                               const RealPrimitiveCharacter& chi, std::uint64_t r) {
  return nkl_decompose(with_character(K, L, delta, q, a, chi, r));
}

}  // namespace exsieve
