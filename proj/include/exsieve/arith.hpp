#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exsieve/factor_table.hpp"

namespace exsieve {

enum class ArithKind { VonMangoldt, Mobius, Totient, Divisor, Divisor3, Lambda, LambdaPrime, Custom };

std::string_view to_string(ArithKind kind);
// Accepts the labels produced by to_string plus the short forms
// "Lambda", "mu", "phi", "tau", "tau3". Throws InvalidArgument otherwise.
ArithKind parse_arith_kind(std::string_view label);

// Values f(1..N). Index 0 is stored but carries no meaning (always 0).
class ArithSequence {
 public:
  ArithSequence(ArithKind kind, std::vector<double> values_with_zero);

  ArithKind kind() const { return kind_; }
  std::uint64_t size() const { return values_.size() - 1; }

  double operator[](std::uint64_t n) const { return values_[n]; }
  double at(std::uint64_t n) const;
  std::span<const double> values() const { return values_; }

 private:
  ArithKind kind_;
  std::vector<double> values_;
};

// Sequence from a callable, n = 1..N.
template <typename F>
ArithSequence make_sequence(ArithKind kind, std::uint64_t N, F&& f) {
  std::vector<double> v(N + 1, 0.0);
  for (std::uint64_t n = 1; n <= N; ++n) v[n] = static_cast<double>(f(n));
  return ArithSequence(kind, std::move(v));
}

double von_mangoldt(std::uint64_t n, const FactorTable& table);

// kind must be one of VonMangoldt, Mobius, Totient, Divisor, Divisor3.
ArithSequence arith_table(ArithKind kind, std::uint64_t N, const FactorTable& table);

// The neutral element of Dirichlet convolution (1 at n = 1).
ArithSequence delta_sequence(std::uint64_t N);

ArithSequence dirichlet_convolve(const ArithSequence& f, const ArithSequence& g, std::uint64_t N);

// n <= floor(x), n = a (mod q), compensated sum of Lambda(n).
double psi_progression(double x, std::uint64_t q, std::uint64_t a, const FactorTable& table);

struct SiftedPsi {
  double sifted = 0.0;       // P^-(n) > z
  double small_prime = 0.0;  // P^-(n) <= z, same progression
  double bes_bound = 0.0;    // pi(z) log x
};

SiftedPsi sifted_psi_progression(double x, std::uint64_t q, std::uint64_t a, double z, const FactorTable& table);

// Scalar helpers by trial division; meant for moduli, not for sweeps.
std::uint64_t totient(std::uint64_t n);
std::uint64_t divisor_count(std::uint64_t n);
int mobius(std::uint64_t n);
std::vector<std::uint64_t> divisors(std::uint64_t n);
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

}  // namespace exsieve
