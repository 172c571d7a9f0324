#include "exsieve/progression_sums.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "exsieve/error.hpp"
#include "exsieve/kloosterman.hpp"
#include "exsieve/lfunctions.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

namespace {

void check_limit(std::uint64_t N, const FactorTable& table) {
  if (N > table.limit())
    throw OutOfRange("N = " + std::to_string(N) + " exceeds table limit " + std::to_string(table.limit()));
}

void check_coprime(std::uint64_t q, std::uint64_t a) {
  if (q == 0 || a == 0) throw InvalidArgument("q and a must be positive");
  if (std::gcd(a, q) != 1)
    throw InvalidArgument("gcd(a, q) != 1 for a = " + std::to_string(a) + ", q = " + std::to_string(q));
}

std::uint64_t first_in_class(std::uint64_t q, std::uint64_t a) {
  const std::uint64_t r = a % q;
  return r == 0 ? q : r;
}

// coprime[r] = gcd(r, q) == 1 for r in [0, q).
std::vector<std::uint8_t> coprime_residues(std::uint64_t q) {
  std::vector<std::uint8_t> out(q);
  for (std::uint64_t r = 0; r < q; ++r) out[r] = std::gcd(r, q) == 1;
  return out;
}

}  // namespace

ArithSequence lambda_table(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table) {
  check_limit(N, table);
  std::vector<double> v(N + 1, 0.0);
  std::vector<std::int32_t> acc(N + 1, 0);
  for (std::uint64_t d = 1; d <= N; ++d) {
    const int c = chi(static_cast<std::int64_t>(d));
    if (c == 0) continue;
    for (std::uint64_t m = d; m <= N; m += d) acc[m] += c;
  }
  for (std::uint64_t n = 1; n <= N; ++n) v[n] = acc[n];
  return ArithSequence(ArithKind::Lambda, std::move(v));
}

ArithSequence lambdaprime_table(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table) {
  check_limit(N, table);
  std::vector<double> logs(N + 1, 0.0);
  for (std::uint64_t k = 2; k <= N; ++k) logs[k] = std::log(static_cast<double>(k));
  std::vector<double> v(N + 1, 0.0);
  // lambda'(d k) += chi(d) log k
  for (std::uint64_t d = 1; d <= N; ++d) {
    const int c = chi(static_cast<std::int64_t>(d));
    if (c == 0) continue;
    for (std::uint64_t k = 2, m = 2 * d; m <= N; ++k, m += d) v[m] += c * logs[k];
  }
  return ArithSequence(ArithKind::LambdaPrime, std::move(v));
}

double verify_lL_identity(const RealPrimitiveCharacter& chi, std::uint64_t N, const FactorTable& table) {
  const auto lp = lambdaprime_table(chi, N, table);
  const auto lam = lambda_table(chi, N, table);
  const auto Lambda = arith_table(ArithKind::VonMangoldt, N, table);
  std::vector<double> rhs(N + 1, 0.0);
  for (std::uint64_t l = 2; l <= N; ++l) {
    const double L = Lambda[l];
    if (L == 0.0) continue;
    rhs[l] += L;  // k = 1 term
    for (std::uint64_t k = 2, n = 2 * l; n <= N; ++k, n += l)
      if (lam[k] != 0.0) rhs[n] += lam[k] * L;
  }
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) worst = std::max(worst, std::fabs(lp[n] - rhs[n]));
  return worst;
}

ProgressionContext::ProgressionContext(const FactorTable& table, const RealPrimitiveCharacter& chi, std::uint64_t N)
    : table_(table),
      chi_(chi),
      N_(N),
      Lambda_(arith_table(ArithKind::VonMangoldt, N, table)),
      lambda_(lambda_table(chi, N, table)),
      lambda_prime_(lambdaprime_table(chi, N, table)),
      l_one_(l_one_closed_form(chi)) {}

std::uint64_t ProgressionContext::floor_x(double x) const {
  if (!(x >= 0.0)) throw InvalidArgument("x must be non-negative");
  const double fx = std::floor(x);
  if (fx > static_cast<double>(N_))
    throw OutOfRange("x = " + std::to_string(x) + " exceeds context limit " + std::to_string(N_));
  return static_cast<std::uint64_t>(fx);
}

double euler_factor_over(const RealPrimitiveCharacter& chi, std::uint64_t q) {
  double prod = 1.0;
  for (std::uint64_t p : prime_divisors(q)) prod *= 1.0 - chi(static_cast<std::int64_t>(p)) / static_cast<double>(p);
  return prod;
}

double main_term_indicator(const RealPrimitiveCharacter& chi, std::uint64_t q, std::uint64_t a) {
  const bool divides = q % chi.modulus() == 0;
  return 1.0 - (divides ? chi(static_cast<std::int64_t>(a)) : 0);
}

HyperbolaEstimate lambda_sum_coprime(const ProgressionContext& ctx, double x, std::uint64_t q, double eps) {
  if (q == 0) throw InvalidArgument("q must be positive");
  HyperbolaEstimate out;
  const std::uint64_t X = ctx.floor_x(std::max(x, 0.0));
  const auto cop = coprime_residues(q);
  CompensatedSum s;
  for (std::uint64_t n = 1; n <= X; ++n)
    if (cop[n % q]) s.add(ctx.lambda()[n]);
  const auto& chi = ctx.chi();
  const double D = static_cast<double>(chi.modulus());
  out.direct = s.value();
  out.main_term = x >= 1.0 ? x * static_cast<double>(totient(q)) / static_cast<double>(q) * euler_factor_over(chi, q) * ctx.l_one() : 0.0;
  out.error = out.direct - out.main_term;
  out.envelope = static_cast<double>(divisor_count(q)) * std::sqrt(std::max(x, 0.0)) * std::pow(D, 0.5 + eps);
  out.ratio = out.envelope > 0.0 ? out.error / out.envelope : 0.0;
  return out;
}

HyperbolaEstimate lambda_sum_progression(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a,
                                         double eps) {
  check_coprime(q, a);
  HyperbolaEstimate out;
  const std::uint64_t X = ctx.floor_x(x);
  CompensatedSum s;
  for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) s.add(ctx.lambda()[n]);
  const auto& chi = ctx.chi();
  const double D = static_cast<double>(chi.modulus());
  const double twist = (q % chi.modulus() == 0) ? chi(static_cast<std::int64_t>(a)) : 0.0;
  out.direct = s.value();
  out.main_term = x * (1.0 + twist) / static_cast<double>(q) * euler_factor_over(chi, q) * ctx.l_one();
  out.error = out.direct - out.main_term;
  out.envelope = D * std::pow(x, 1.0 - eps / 2.0) / static_cast<double>(q);
  out.ratio = out.error / out.envelope;
  out.in_asserted_regime = static_cast<double>(q) <= std::pow(x, 2.0 / 3.0 - eps);
  return out;
}

LambdaPrimeReport lambdaprime_sum_progression(const ProgressionContext& ctx, double x, std::uint64_t q,
                                              std::uint64_t a, double eps) {
  check_coprime(q, a);
  LambdaPrimeReport out;
  const std::uint64_t X = ctx.floor_x(x);
  const auto& lp = ctx.lambda_prime();
  CompensatedSum prog, cop;
  for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) prog.add(lp[n]);
  const auto residues = coprime_residues(q);
  for (std::uint64_t n = 1; n <= X; ++n)
    if (residues[n % q]) cop.add(lp[n]);
  const auto& chi = ctx.chi();
  const double D = static_cast<double>(chi.modulus());
  const double phi = static_cast<double>(totient(q));
  const double twist = (q % chi.modulus() == 0) ? chi(static_cast<std::int64_t>(a)) : 0.0;
  out.progression = prog.value();
  out.coprime = cop.value();
  out.main_term = (1.0 - twist) / phi * out.coprime;
  out.secondary_term = twist / static_cast<double>(q) * (x * std::log(x) - x) * euler_factor_over(chi, q) * ctx.l_one();
  out.residual = out.progression - out.main_term - out.secondary_term;
  out.envelope = std::pow(x, 0.5 + eps) * std::pow(D, 0.5 + eps) / std::pow(static_cast<double>(q), 0.25);
  out.ratio = out.residual / out.envelope;
  out.in_asserted_regime = x > static_cast<double>(q) * D;
  return out;
}

CompaReport compa_difference(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a, double eps) {
  check_coprime(q, a);
  CompaReport out;
  const std::uint64_t X = ctx.floor_x(x);
  const auto residues = coprime_residues(q);
  const std::uint64_t target = a % q;
  const auto& lam = ctx.lambda();
  CompensatedSum prog, cop;
  for (std::uint64_t k = 1; k <= X; ++k) {
    const double lk = lam[k];
    if (lk == 0.0) continue;
    const std::uint64_t kr = k % q;
    const std::uint64_t lmax = X / k;
    std::int64_t hits = 0, coprime_pairs = 0;
    for (std::uint64_t l = 1; l <= lmax; ++l) {
      const std::uint64_t lr = l % q;
      if (kr * lr % q == target) ++hits;
      if (residues[kr] && residues[lr]) ++coprime_pairs;
    }
    prog.add(lk * static_cast<double>(hits));
    cop.add(lk * static_cast<double>(coprime_pairs));
  }
  out.difference = prog.value() - cop.value() / static_cast<double>(totient(q));
  out.envelope = static_cast<double>(ctx.chi().modulus()) * std::pow(x, 1.0 - eps / 6.0) / static_cast<double>(q);
  out.in_asserted_regime = static_cast<double>(q) <= std::pow(x, 58.0 / 115.0 - eps);
  return out;
}

PartitionDefects partition_identity_defects(const ProgressionContext& ctx, double x, std::uint64_t q) {
  if (q == 0) throw InvalidArgument("q must be positive");
  const std::uint64_t X = ctx.floor_x(x);
  const ArithSequence* seqs[3] = {&ctx.von_mangoldt(), &ctx.lambda(), &ctx.lambda_prime()};
  double defects[3] = {0, 0, 0};
  const auto residues = coprime_residues(q);
  for (int i = 0; i < 3; ++i) {
    const auto& f = *seqs[i];
    CompensatedSum coprime;
    for (std::uint64_t n = 1; n <= X; ++n)
      if (residues[n % q]) coprime.add(f[n]);
    CompensatedSum total;
    for (std::uint64_t a = 1; a <= q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      CompensatedSum prog;
      for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) prog.add(f[n]);
      total.add(prog.value());
    }
    const double ref = coprime.value();
    defects[i] = std::fabs(total.value() - ref) / std::max(1.0, std::fabs(ref));
  }
  return {defects[0], defects[1], defects[2]};
}

TripleConvolution sifted_triple_convolution(double x, std::uint64_t q, std::uint64_t a, const BoundedSequence& f1,
                                            const BoundedSequence& f2, const BoundedSequence& f3,
                                            const BetaSieveWeight& w, const FactorTable& table) {
  check_coprime(q, a);
  if (!(x >= 1.0)) throw InvalidArgument("x must be at least 1");
  const std::uint64_t X = static_cast<std::uint64_t>(std::floor(x));
  check_limit(X, table);
  const BoundedSequence* fs[3] = {&f1, &f2, &f3};
  for (int i = 0; i < 3; ++i) {
    const auto& f = *fs[i];
    if (f.values.size() < X) throw InvalidArgument("input sequence shorter than x");
    if (i > 0 && f.bound != SizeBound::Unit) throw InvalidArgument("f2 and f3 must be bounded by 1");
    for (std::uint64_t n = 1; n <= X; ++n) {
      const double cap = (f.bound == SizeBound::Unit ? 1.0 : std::log(static_cast<double>(n))) + 1e-12;
      if (std::fabs(f.values[n]) > cap)
        throw InvalidArgument("f" + std::to_string(i + 1) + "(" + std::to_string(n) + ") = " +
                              std::to_string(f.values[n]) + " exceeds its declared bound");
    }
  }

  TripleConvolution out;
  // direct
  {
    const auto f12 = dirichlet_convolve(f1.values, f2.values, X);
    const auto f = dirichlet_convolve(f12, f3.values, X);
    CompensatedSum s;
    for (std::uint64_t n = first_in_class(q, a); n <= X; n += q) {
      if (n > 1 && static_cast<double>(table.spf(n)) <= w.z()) continue;
      s.add(f[n]);
    }
    out.direct = s.value();
  }
  // expanded, literally over (d1, d2, d3)
  {
    const auto inv = inverse_table(q);
    const auto& A = f1.values;
    const auto& B = f2.values;
    const auto& C = f3.values;
    std::vector<std::pair<std::uint64_t, int>> ds;
    for (std::size_t i = 0; i < w.support().size(); ++i) {
      const std::uint64_t d = w.support()[i];
      if (d > X) break;
      if (std::gcd(d, q) == 1) ds.emplace_back(d, w.weights()[i]);
    }
    CompensatedSum total;
    for (auto [d1, w1] : ds)
      for (auto [d2, w2] : ds) {
        if (d1 * d2 > X) break;
        for (auto [d3, w3] : ds) {
          const std::uint64_t dd = d1 * d2 * d3;
          if (dd > X) break;
          const std::uint64_t Y = X / dd;
          const std::uint64_t target = (q == 1) ? 0 : (a % q) * inv[dd % q] % q;
          CompensatedSum inner;
          for (std::uint64_t k = 1; k <= Y; ++k) {
            const double ak = A[k * d1];
            if (ak == 0.0) continue;
            for (std::uint64_t l = 1; k * l <= Y; ++l) {
              const double bl = B[l * d2];
              if (bl == 0.0) continue;
              const std::uint64_t kl = k * l;
              if (std::gcd(kl % q, q) != 1 && q != 1) continue;
              const std::uint64_t mres = (q == 1) ? 0 : target * inv[kl % q] % q;
              const std::uint64_t m0 = mres == 0 ? q : mres;
              const std::uint64_t mmax = Y / kl;
              double acc = 0.0;
              for (std::uint64_t m = m0; m <= mmax; m += q) acc += C[m * d3];
              if (acc != 0.0) inner.add(ak * bl * acc);
            }
          }
          total.add(static_cast<double>(w1 * w2 * w3) * inner.value());
        }
      }
    out.expanded = total.value();
  }
  const double phi = static_cast<double>(totient(q));
  out.envelope = std::exp(-w.u() / 15.0) * (x / phi) * std::pow(std::log(x) / std::log(w.z()), 12.0);
  return out;
}

JokaReport joka_sum(const ProgressionContext& ctx, double x, double z, double eta, double c) {
  if (!(z > 1.0)) throw InvalidArgument("z must exceed 1");
  if (!(eta > 1.0)) throw InvalidArgument("eta must exceed 1");
  JokaReport out;
  if (z >= x) return out;
  const std::uint64_t X = ctx.floor_x(x);
  const auto spf = ctx.table().entries();
  const auto& lam = ctx.lambda();
  CompensatedSum s;
  for (std::uint64_t n = static_cast<std::uint64_t>(std::floor(z)) + 1; n <= X; ++n) {
    if (static_cast<double>(spf[n]) <= z) continue;
    if (lam[n] != 0.0) s.add(lam[n] / static_cast<double>(n));
  }
  out.value = s.value();
  out.V = std::log(x) / std::log(z);
  out.envelope = std::pow(out.V, 3) / eta + std::exp(-c * std::sqrt(out.V * std::log(eta)));
  return out;
}

double DecompositionReport::closure_tolerance() const { return 1e-6 * (1.0 + std::fabs(psi_prog)); }

DecompositionReport decomposition_pipeline(const ProgressionContext& ctx, double x, std::uint64_t q,
                                           std::uint64_t a, double z) {
  check_coprime(q, a);
  if (!(z >= 1.0)) throw InvalidArgument("z must be at least 1");
  const std::uint64_t X = ctx.floor_x(x);
  const auto& chi = ctx.chi();
  const auto spf = ctx.table().entries();
  const auto& Lambda = ctx.von_mangoldt();
  const auto& lam = ctx.lambda();
  const auto& lp = ctx.lambda_prime();
  const auto residues = coprime_residues(q);
  const std::uint64_t target = a % q;
  // P^-(n) > z; P^-(1) = +infinity.
  auto rough = [&](std::uint64_t n) { return n == 1 || static_cast<double>(spf[n]) > z; };

  DecompositionReport rep;
  rep.x = x;
  rep.q = q;
  rep.a = a;
  rep.z = z;
  rep.disc = chi.discriminant();
  const double phi = static_cast<double>(totient(q));
  rep.indicator = main_term_indicator(chi, q, a);
  const double weight = rep.indicator / phi;

  {
    CompensatedSum prog, total;
    for (std::uint64_t n = 2; n <= X; ++n) {
      const double L = Lambda[n];
      if (L == 0.0) continue;
      total.add(L);
      if (n % q == target) prog.add(L);
    }
    rep.psi_prog = prog.value();
    rep.psi_total = total.value();
  }
  rep.main = rep.psi_total / phi * rep.indicator;

  {
    CompensatedSum prog, cop;
    for (std::uint64_t n = 1; n <= X; ++n) {
      if (!rough(n)) continue;
      const double v = lp[n];
      if (v == 0.0) continue;
      if (n % q == target) prog.add(v);
      if (residues[n % q]) cop.add(v);
    }
    rep.Delta = prog.value() - weight * cop.value();
  }

  {
    // l runs over z-rough prime powers, k over z-rough k > z with k l <= x.
    const std::uint64_t k_start = static_cast<std::uint64_t>(std::floor(z)) + 1;
    CompensatedSum s1, s2;
    for (std::uint64_t l = 2; l <= X; ++l) {
      const double L = Lambda[l];
      if (L == 0.0 || !rough(l)) continue;
      const std::uint64_t kmax = X / l;
      const std::uint64_t lr = l % q;
      double acc1 = 0.0, acc2 = 0.0;
      for (std::uint64_t k = std::max<std::uint64_t>(k_start, 2); k <= kmax; ++k) {
        if (!rough(k)) continue;
        const double lk = lam[k];
        if (lk == 0.0) continue;
        const std::uint64_t kr = k % q;
        if (residues[kr] && residues[lr]) acc1 += lk;
        if (kr * lr % q == target) acc2 += lk;
      }
      if (acc1 != 0.0) s1.add(acc1 * L);
      if (acc2 != 0.0) s2.add(acc2 * L);
    }
    rep.S1 = s1.value();
    rep.S2 = s2.value();
  }

  {
    CompensatedSum spp, sifted_cop;
    for (std::uint64_t n = 2; n <= X; ++n) {
      const double L = Lambda[n];
      if (L == 0.0) continue;
      const bool is_rough = rough(n);
      if (n % q == target && !is_rough) spp.add(L);
      if (residues[n % q] && is_rough) sifted_cop.add(L);
    }
    rep.small_prime_prog = spp.value();
    rep.small_prime_coprime = rep.psi_total - sifted_cop.value();
  }
  rep.correction = rep.small_prime_prog - weight * rep.small_prime_coprime;

  const double lhs = rep.psi_prog - rep.main;
  const double rhs = rep.Delta + weight * rep.S1 - rep.S2 + rep.correction;
  rep.lhs_minus_rhs = lhs - rhs;
  return rep;
}

Schedule schedule_unchecked(double x, std::uint64_t D, double eta, double eps) {
  if (D < 2) throw OutOfDomain("schedule needs D >= 2");
  if (!(eta > 1.0)) throw OutOfDomain("schedule needs eta > 1");
  if (!(x > 1.0) || !std::isfinite(x)) throw OutOfDomain("schedule needs finite x > 1");
  if (!(eps > 0.0)) throw OutOfDomain("schedule needs eps > 0");
  const double logD = std::log(static_cast<double>(D));
  Schedule s;
  s.V = std::log(x) / logD;
  const double m = std::min(std::sqrt(s.V / std::log(eta)), 2.0);
  s.log_z = m * logD;
  s.z = std::exp(s.log_z);
  s.u = eps * s.V / (200.0 * m);
  const double lhs = s.u * s.log_z;
  const double rhs = eps / 200.0 * std::log(x);
  if (std::fabs(lhs - rhs) > 1e-9 * std::fabs(rhs))
    throw InternalConsistency("z^u != x^{eps/200} in schedule");
  return s;
}

Schedule parameter_schedule(double x, std::uint64_t D, double eta, double eps) {
  if (!(eps > 0.0 && eps < 0.01)) throw OutOfDomain("schedule needs eps in (0, 1/100)");
  if (D < 2) throw OutOfDomain("schedule needs D >= 2");
  if (!(x > 1.0) || !std::isfinite(x)) throw OutOfDomain("schedule needs finite x > 1");
  const double V = std::log(x) / std::log(static_cast<double>(D));
  if (!(V >= 200.0 / eps))
    throw OutOfDomain("schedule needs V >= 200/eps (V = " + std::to_string(V) + ", 200/eps = " + std::to_string(200.0 / eps) + ")");
  return schedule_unchecked(x, D, eta, eps);
}

double equidistribution_envelope(double V, double eta, double C_eps) {
  return std::pow(V, 16.0) / eta + std::exp(-C_eps * std::sqrt(V * std::log(eta)));
}

EquidistributionReport equidistribution_error_report(const ProgressionContext& ctx, double x, std::uint64_t q, std::uint64_t a,
                                     double z, double eta, double C_eps) {
  if (!(eta > 1.0)) throw InvalidArgument("eta must exceed 1");
  EquidistributionReport rep;
  rep.decomposition = decomposition_pipeline(ctx, x, q, a, z);
  const auto& d = rep.decomposition;
  const double phi = static_cast<double>(totient(q));
  rep.measured = d.psi_total > 0.0 ? std::fabs(d.psi_prog * phi / d.psi_total - d.indicator) : 0.0;
  const double V = std::log(x) / std::log(static_cast<double>(ctx.chi().modulus()));
  rep.envelope = equidistribution_envelope(V, eta, C_eps);
  rep.ratio = rep.measured / rep.envelope;
  return rep;
}

}  // namespace exsieve
