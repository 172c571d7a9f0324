#include "exsieve/lfunctions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "exsieve/error.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

double character_sum_envelope(const RealPrimitiveCharacter& chi) {
  const double D = static_cast<double>(chi.modulus());
  return std::sqrt(D) * std::log(D);
}

LEvaluation l_value(const RealPrimitiveCharacter& chi, double s, std::uint64_t terms) {
  if (!(s > 0.0)) throw OutOfDomain("L(s, chi) is evaluated only for s > 0, got s = " + std::to_string(s));
  if (terms < chi.modulus())
    throw InvalidArgument("terms = " + std::to_string(terms) + " is below one period D = " + std::to_string(chi.modulus()));
  CompensatedSum acc;
  const std::uint64_t D = chi.modulus();
  std::uint64_t r = 1 % D;
  const bool harmonic = (s == 1.0);
  for (std::uint64_t n = 1; n <= terms; ++n) {
    const int c = chi.at_residue(r);
    if (c != 0) {
      const double dn = static_cast<double>(n);
      const double t = harmonic ? 1.0 / dn : std::pow(dn, -s);
      acc.add(c > 0 ? t : -t);
    }
    if (++r == D) r = 0;
  }
  LEvaluation out;
  out.s = s;
  out.terms = terms;
  out.value = acc.value();
  out.tail_bound = character_sum_envelope(chi) * std::max(s, 1.0) * std::pow(static_cast<double>(terms), -s);
  return out;
}

LEvaluation l_one_certified(const RealPrimitiveCharacter& chi, std::uint64_t start, std::uint64_t max_terms) {
  std::uint64_t terms = std::max<std::uint64_t>(start, chi.modulus());
  while (true) {
    auto ev = l_value(chi, 1.0, terms);
    if (ev.value - ev.tail_bound > 0.0 || terms >= max_terms) return ev;
    terms *= 2;
  }
}

double l_one_closed_form(const RealPrimitiveCharacter& chi) {
  const auto D = chi.modulus();
  CompensatedSum acc;
  if (chi.discriminant() < 0) {
    for (std::uint64_t r = 1; r < D; ++r) acc.add(static_cast<double>(r) * chi.at_residue(r));
    return -std::numbers::pi * acc.value() / std::pow(static_cast<double>(D), 1.5);
  }
  for (std::uint64_t r = 1; r < D; ++r) {
    const int c = chi.at_residue(r);
    if (c == 0) continue;
    acc.add(c * std::log(std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(D))));
  }
  return -acc.value() / std::sqrt(static_cast<double>(D));
}

SiegelZeroReport scan_real_zeros(const std::function<double(double)>& f, double log_modulus, double s_lo,
                                 double s_hi, int grid, double tol) {
  if (grid < 2) throw InvalidArgument("grid must have at least 2 points, got " + std::to_string(grid));
  if (!(tol >= 1e-12)) throw InvalidArgument("bisection tolerance must be at least 1e-12");
  if (!(s_lo > 0.0 && s_lo < s_hi)) throw InvalidArgument("need 0 < s_lo < s_hi");

  SiegelZeroReport report;
  report.tolerance = tol;
  double prev_s = s_lo;
  double prev_v = f(s_lo);
  std::optional<std::pair<double, double>> best;  // bracket whose zero lies closest to 1
  double best_lo_v = 0.0, best_hi_v = 0.0;

  for (int i = 1; i < grid; ++i) {
    const double s = (i == grid - 1) ? s_hi : s_lo + (s_hi - s_lo) * i / (grid - 1);
    const double v = f(s);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0) || v == 0.0) {
      ++report.sign_changes;
      double lo = prev_s, hi = s, vlo = prev_v, vhi = v;
      if (v == 0.0) {
        lo = hi = s;
        vlo = vhi = 0.0;
      }
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double vm = f(mid);
        if (vm == 0.0) {
          lo = hi = mid;
          vlo = vhi = 0.0;
          break;
        }
        if ((vm < 0.0) == (vlo < 0.0)) {
          lo = mid;
          vlo = vm;
        } else {
          hi = mid;
          vhi = vm;
        }
      }
      const double mid = 0.5 * (lo + hi);
      if (!best || std::fabs(mid - 1.0) < std::fabs(0.5 * (best->first + best->second) - 1.0)) {
        best = {lo, hi};
        best_lo_v = vlo;
        best_hi_v = vhi;
      }
    }
    prev_s = s;
    prev_v = v;
  }
  if (best) {
    report.s_lo = best->first;
    report.s_hi = best->second;
    report.value_lo = best_lo_v;
    report.value_hi = best_hi_v;
    report.beta = 0.5 * (best->first + best->second);
    report.eta = 1.0 / ((1.0 - *report.beta) * log_modulus);
  } else {
    report.s_lo = s_lo;
    report.s_hi = s_hi;
  }
  return report;
}

SiegelZeroReport scan_real_zeros(const RealPrimitiveCharacter& chi, double s_lo, double s_hi, int grid, double tol,
                                 std::uint64_t terms) {
  if (!(s_hi <= 2.0)) throw InvalidArgument("scan range must satisfy s_hi <= 2");
  auto f = [&](double s) { return l_value(chi, s, terms).value; };
  return scan_real_zeros(f, std::log(static_cast<double>(chi.modulus())), s_lo, s_hi, grid, tol);
}

double sifted_euler_product(const RealPrimitiveCharacter& chi, double z, const FactorTable& table) {
  if (z > static_cast<double>(table.limit()))
    throw OutOfRange("z = " + std::to_string(z) + " exceeds table limit " + std::to_string(table.limit()));
  CompensatedSum logs;
  for (std::uint32_t p : table.primes_up_to(z)) {
    const int c = chi(p);
    if (c != 0) logs.add(std::log1p(-static_cast<double>(c) / p));
  }
  return std::exp(logs.value());
}

double fdp_report(const RealPrimitiveCharacter& chi, double z, double eta, const FactorTable& table) {
  const double D = static_cast<double>(chi.modulus());
  if (!(z > 1.0 && z <= D * D))
    throw OutOfDomain("sifted L-value bound needs z in (1, D^2]; got z = " + std::to_string(z) + ", D^2 = " + std::to_string(D * D));
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  const double numerator = l_one_closed_form(chi) * sifted_euler_product(chi, z, table);
  const double denominator = std::log(D) / (eta * std::log(z));
  return numerator / denominator;
}

}  // namespace exsieve
