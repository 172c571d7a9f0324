#include "exsieve/arith.hpp"

#include <cmath>
#include <numeric>

#include "exsieve/error.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

std::string_view to_string(ArithKind kind) {
  switch (kind) {
    case ArithKind::VonMangoldt: return "von_mangoldt";
    case ArithKind::Mobius: return "mobius";
    case ArithKind::Totient: return "totient";
    case ArithKind::Divisor: return "divisor";
    case ArithKind::Divisor3: return "divisor3";
    case ArithKind::Lambda: return "lambda";
    case ArithKind::LambdaPrime: return "lambda_prime";
    case ArithKind::Custom: return "custom";
  }
  return "unknown";
}

ArithKind parse_arith_kind(std::string_view label) {
  for (auto k : {ArithKind::VonMangoldt, ArithKind::Mobius, ArithKind::Totient, ArithKind::Divisor,
                 ArithKind::Divisor3, ArithKind::Lambda, ArithKind::LambdaPrime, ArithKind::Custom})
    if (label == to_string(k)) return k;
  if (label == "Lambda") return ArithKind::VonMangoldt;
  if (label == "mu") return ArithKind::Mobius;
  if (label == "phi") return ArithKind::Totient;
  if (label == "tau") return ArithKind::Divisor;
  if (label == "tau3") return ArithKind::Divisor3;
  throw InvalidArgument("unknown arithmetic function kind '" + std::string(label) + "'");
}

ArithSequence::ArithSequence(ArithKind kind, std::vector<double> values_with_zero)
    : kind_(kind), values_(std::move(values_with_zero)) {
  if (values_.empty()) values_.push_back(0.0);
  values_[0] = 0.0;
}

double ArithSequence::at(std::uint64_t n) const {
  if (n == 0 || n > size())
    throw OutOfRange("index " + std::to_string(n) + " outside 1.." + std::to_string(size()));
  return values_[n];
}

double von_mangoldt(std::uint64_t n, const FactorTable& table) {
  if (n > table.limit())
    throw OutOfRange("n = " + std::to_string(n) + " exceeds table limit " + std::to_string(table.limit()));
  if (n < 2) return 0.0;
  const std::uint64_t p = table.spf(n);
  std::uint64_t m = n;
  while (m % p == 0) m /= p;
  return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

ArithSequence arith_table(ArithKind kind, std::uint64_t N, const FactorTable& table) {
  if (N > table.limit())
    throw OutOfRange("N = " + std::to_string(N) + " exceeds table limit " + std::to_string(table.limit()));
  switch (kind) {
    case ArithKind::VonMangoldt:
    case ArithKind::Mobius:
    case ArithKind::Totient:
    case ArithKind::Divisor:
    case ArithKind::Divisor3:
      break;
    default:
      throw InvalidArgument("arith_table does not build kind '" + std::string(to_string(kind)) + "'");
  }

  // For each n: p = spf(n), pk = exact power of p dividing n, e its exponent.
  // f(n) = f(n / pk) * f(pk) for the multiplicative kinds.
  std::vector<std::uint64_t> pk(N + 1, 1);
  std::vector<std::uint8_t> ex(N + 1, 0);
  std::vector<double> v(N + 1, 0.0);
  if (N >= 1) v[1] = (kind == ArithKind::VonMangoldt) ? 0.0 : 1.0;
  for (std::uint64_t n = 2; n <= N; ++n) {
    const std::uint64_t p = table.spf(n);
    const std::uint64_t m = n / p;
    if (m % p == 0) {
      pk[n] = pk[m] * p;
      ex[n] = static_cast<std::uint8_t>(ex[m] + 1);
    } else {
      pk[n] = p;
      ex[n] = 1;
    }
    const int e = ex[n];
    const std::uint64_t rest = n / pk[n];
    switch (kind) {
      case ArithKind::VonMangoldt:
        v[n] = (rest == 1) ? std::log(static_cast<double>(p)) : 0.0;
        break;
      case ArithKind::Mobius:
        v[n] = (e >= 2) ? 0.0 : -v[rest];
        break;
      case ArithKind::Totient:
        v[n] = v[rest] * static_cast<double>(pk[n] - pk[n] / p);
        break;
      case ArithKind::Divisor:
        v[n] = v[rest] * (e + 1);
        break;
      case ArithKind::Divisor3:
        v[n] = v[rest] * ((e + 1) * (e + 2) / 2);
        break;
      default:
        break;
    }
  }
  return ArithSequence(kind, std::move(v));
}

ArithSequence delta_sequence(std::uint64_t N) {
  std::vector<double> v(N + 1, 0.0);
  if (N >= 1) v[1] = 1.0;
  return ArithSequence(ArithKind::Custom, std::move(v));
}

ArithSequence dirichlet_convolve(const ArithSequence& f, const ArithSequence& g, std::uint64_t N) {
  if (f.size() < N || g.size() < N)
    throw InvalidArgument("dirichlet_convolve: inputs of length " + std::to_string(f.size()) + " and " +
                          std::to_string(g.size()) + " do not cover N = " + std::to_string(N));
  std::vector<double> out(N + 1, 0.0);
  for (std::uint64_t a = 1; a <= N; ++a) {
    const double fa = f[a];
    if (fa == 0.0) continue;
    for (std::uint64_t b = 1, n = a; n <= N; ++b, n += a) out[n] += fa * g[b];
  }
  return ArithSequence(ArithKind::Custom, std::move(out));
}

namespace {

void check_progression(std::uint64_t q, std::uint64_t a) {
  if (q == 0 || a == 0) throw InvalidArgument("progression needs positive q and a");
  if (std::gcd(a, q) != 1)
    throw InvalidArgument("gcd(a, q) = " + std::to_string(std::gcd(a, q)) + " != 1 for a = " + std::to_string(a) +
                          ", q = " + std::to_string(q));
}

std::uint64_t floor_limit(double x, const FactorTable& table) {
  if (!(x >= 0.0)) return 0;
  const double fx = std::floor(x);
  if (fx > static_cast<double>(table.limit()))
    throw OutOfRange("x = " + std::to_string(x) + " exceeds table limit " + std::to_string(table.limit()));
  return static_cast<std::uint64_t>(fx);
}

// First n >= 1 with n = a (mod q).
std::uint64_t first_in_class(std::uint64_t q, std::uint64_t a) {
  const std::uint64_t r = a % q;
  return r == 0 ? q : r;
}

}  // namespace

double psi_progression(double x, std::uint64_t q, std::uint64_t a, const FactorTable& table) {
  check_progression(q, a);
  const std::uint64_t X = floor_limit(x, table);
  CompensatedSum s;
  for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) {
    const double l = von_mangoldt(n, table);
    if (l != 0.0) s.add(l);
  }
  return s.value();
}

SiftedPsi sifted_psi_progression(double x, std::uint64_t q, std::uint64_t a, double z, const FactorTable& table) {
  check_progression(q, a);
  if (!(z >= 1.0)) throw InvalidArgument("sifting level z must be at least 1");
  const std::uint64_t X = floor_limit(x, table);
  CompensatedSum rough, small;
  for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) {
    const double l = von_mangoldt(n, table);
    if (l == 0.0) continue;
    if (static_cast<double>(table.spf(n)) > z)
      rough.add(l);
    else
      small.add(l);
  }
  SiftedPsi out;
  out.sifted = rough.value();
  out.small_prime = small.value();
  out.bes_bound = static_cast<double>(table.prime_count(z)) * (x >= 1.0 ? std::log(x) : 0.0);
  return out;
}

std::uint64_t totient(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p : prime_divisors(n)) result = result / p * (p - 1);
  return result;
}

std::uint64_t divisor_count(std::uint64_t n) { return divisors(n).size(); }

int mobius(std::uint64_t n) {
  if (n == 0) return 0;
  int sign = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  if (n > 1) sign = -sign;
  return sign;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> lo, hi;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    lo.push_back(d);
    if (d != n / d) hi.push_back(n / d);
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace exsieve
