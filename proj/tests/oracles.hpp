#pragma once

// Slow, obviously-correct reference computations shared by the tests. None of
// these call into the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

inline std::uint64_t spf(std::uint64_t n) {
  if (n < 2) return 0;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return p;
  return n;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_prime(std::uint64_t n) { return n >= 2 && spf(n) == n; }

inline int mobius(std::uint64_t n) {
  int m = 1;
  for (auto [p, e] : factor(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

inline std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d)
    if (n % d == 0) c += (d * d == n) ? 1 : 2;
  return c;
}

inline std::uint64_t totient(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) c += std::gcd(k, n) == 1;
  return c;
}

// ordered triples a b c = n
inline std::uint64_t tau3(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t a = 1; a <= n; ++a)
    if (n % a == 0)
      for (std::uint64_t b = 1; b <= n / a; ++b)
        if ((n / a) % b == 0) ++c;
  return c;
}

inline double von_mangoldt(std::uint64_t n) {
  const auto f = factor(n);
  return f.size() == 1 ? std::log(static_cast<double>(f[0].first)) : 0.0;
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

// Legendre symbol (a|p) for an odd prime p by Euler's criterion.
inline int legendre(std::int64_t a, std::uint64_t p) {
  const auto r = static_cast<std::uint64_t>(((a % static_cast<std::int64_t>(p)) + static_cast<std::int64_t>(p)) %
                                            static_cast<std::int64_t>(p));
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

// Kronecker symbol (d|n) for n >= 1 from its definition: Legendre symbols at
// odd primes and the (d|2) rule, multiplied over the factorization of n.
inline int kronecker(std::int64_t d, std::uint64_t n) {
  int v = 1;
  for (auto [p, e] : factor(n)) {
    int s;
    if (p == 2) {
      if (d % 2 == 0) s = 0;
      else {
        const auto m8 = ((d % 8) + 8) % 8;
        s = (m8 == 1 || m8 == 7) ? 1 : -1;
      }
    } else {
      s = legendre(d, p);
    }
    for (unsigned i = 0; i < e; ++i) v *= s;
  }
  return v;
}

inline std::complex<double> e(double t) {
  const double pi = std::acos(-1.0);
  return {std::cos(2 * pi * t), std::sin(2 * pi * t)};
}

// K(m, n; c) as a complex sum with cos/sin per term.
inline std::complex<double> kloosterman(std::int64_t m, std::int64_t n, std::uint64_t c) {
  std::complex<double> s = 0;
  for (std::uint64_t r = 1; r <= c; ++r) {
    if (std::gcd(r, c) != 1) continue;
    std::uint64_t inv = 0;
    for (std::uint64_t t = 1; t <= c; ++t)
      if ((r * t) % c == 1 % c) {
        inv = t;
        break;
      }
    const auto cc = static_cast<std::int64_t>(c);
    const std::int64_t num = ((m * static_cast<std::int64_t>(r) + n * static_cast<std::int64_t>(inv)) % cc + cc) % cc;
    s += e(static_cast<double>(num) / static_cast<double>(c));
  }
  return s;
}

inline std::uint64_t gcd3(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return std::gcd(std::gcd(a, b), c); }

}  // namespace oracle
