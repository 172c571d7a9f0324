// One PASS/FAIL line per acceptance criterion. Tolerances and caps are fixed
// here and in experiment.hpp; the runtime limits count toward the verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include "exsieve/characters.hpp"
#include "exsieve/experiment.hpp"
#include "exsieve/factor_table.hpp"
#include "exsieve/kloosterman.hpp"
#include "exsieve/lfunctions.hpp"
#include "exsieve/progression_sums.hpp"
#include "exsieve/sieve_weights.hpp"

using namespace exsieve;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = out.ok && secs < limit_s;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const FactorTable& table() {
  static const FactorTable t = load_or_build_factor_table(1'000'000);
  return t;
}

RunConfig shipped_config() { return load_config(EXSIEVE_DEFAULT_CONFIG); }

}  // namespace

int main() {
  table();

  criterion(1, "lambda' = Lambda + lambda * Lambda, N = 1e6, |d| <= 40", 60, [] {
    const double tol = 1e-9 * std::log(1e6);
    double worst = 0.0;
    for (auto d : fundamental_discriminants(40))
      worst = std::max(worst, verify_lL_identity(build_character(d), 1'000'000, table()));
    return Outcome{worst < tol, fmt("max defect %.3g < %.3g", worst, tol)};
  });

  criterion(2, "decomposition closure, 200-point grid, jobs 4", 600, [] {
    auto cfg = shipped_config();
    cfg.grid_points = 200;
    const auto r = run_suite("decompose", cfg, 4);
    return Outcome{r.all_passed() && r.cases_run == 200,
                   fmt("%.0f/%.0f cases", static_cast<double>(r.cases_passed), static_cast<double>(r.cases_run)) +
                       fmt(", max residual %.3g", r.max_residual)};
  });

  criterion(3, "N(K,L) = M1 + M2 + E on 100 seeded tuples", 120, [] {
    auto cfg = shipped_config();
    cfg.random_cases = 100;
    const auto tuples = nkl_random_tuples(cfg);
    double worst = 0.0;
    bool in_range = tuples.size() == 100;
    for (const auto& p : tuples) {
      in_range = in_range && p.q <= 30 && p.D <= 12 && p.K <= 50 && p.L <= 50;
      const auto dec = nkl_decompose(p);
      worst = std::max(worst, std::fabs(dec.residual()));
      in_range = in_range && dec.direct == nkl_direct(p);
    }
    return Outcome{in_range && worst < 1e-6, fmt("max residual %.3g < 1e-6", worst)};
  });

  criterion(4, "complete sums vanish and short sums stay within D/D', D <= 500", 300, [] {
    double worst_complete = 0.0, worst_ratio = 0.0;
    std::uint64_t windows = 0;
    for (auto d : fundamental_discriminants(500)) {
      const auto chi = build_character(d);
      const std::uint64_t D = chi.modulus();
      for (auto dp : divisors(D)) {
        if (dp == D) continue;
        const std::uint64_t period = D / dp;
        for (std::uint64_t b = 0; b < D; ++b) {
          const auto sb = static_cast<std::int64_t>(b);
          worst_complete = std::max(worst_complete, std::fabs(static_cast<double>(progression_complete_sum(chi, dp, sb))));
          if (b >= dp) continue;
          // every window of the progression: start within one period, length up to one period
          std::vector<std::int64_t> prefix(2 * period + 1, 0);
          for (std::uint64_t m = 0; m < 2 * period; ++m)
            prefix[m + 1] = prefix[m] + chi(static_cast<std::int64_t>(m * dp) + sb);
          for (std::uint64_t M = 0; M < period; ++M)
            for (std::uint64_t N = 1; N <= period; ++N) {
              const double s = std::fabs(static_cast<double>(prefix[M + N] - prefix[M]));
              worst_ratio = std::max(worst_ratio, s / static_cast<double>(period));
              ++windows;
            }
          const auto ss = short_progression_sum(chi, dp, sb, 1 + b % 5, period + b % 3);
          if (!ss.within_bound) worst_ratio = std::max(worst_ratio, ss.ratio);
        }
      }
    }
    return Outcome{worst_complete < 1e-9 && worst_ratio <= 1.0,
                   fmt("max |complete| %.3g, max short/(D/D') %.3g", worst_complete, worst_ratio) +
                       fmt(" over %.0f windows", static_cast<double>(windows))};
  });

  criterion(5, "Weil bound c <= 2000, Ramanujan s, q <= 100", 300, [] {
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    bool ok = true;
    for (std::uint64_t c = 1; c <= 2000; ++c) {
      const KloostermanEvaluator eval(c);
      for (int t = 0; t < 100; ++t) {
        const auto m = static_cast<std::int64_t>(rng() % (4 * c)) - static_cast<std::int64_t>(2 * c);
        const auto n = static_cast<std::int64_t>(rng() % (4 * c)) - static_cast<std::int64_t>(2 * c);
        const auto w = weil_check(eval, m, n);
        ok = ok && w.ok;
        worst = std::max(worst, std::fabs(w.value) / w.envelope);
      }
    }
    bool ram = true;
    for (std::int64_t s = 1; s <= 100; ++s)
      for (std::uint64_t q = 1; q <= 100; ++q) ram = ram && ramanujan_identity_check(s, q);
    return Outcome{ok && ram, fmt("max |K|/envelope %.3g, Ramanujan ", worst) + (ram ? "exact" : "FAILED")};
  });

  criterion(6, "Gauss sums |G| = sqrt D, |d| <= 1000", 60, [] {
    double worst = 0.0;
    for (auto d : fundamental_discriminants(1000)) {
      const auto g = gauss_sum(build_character(d));
      worst = std::max(worst, std::fabs(g.magnitude() - std::sqrt(static_cast<double>(std::llabs(d)))));
    }
    return Outcome{worst < 1e-9, fmt("max defect %.3g < 1e-9", worst)};
  });

  criterion(7, "beta-sieve support, upper bound and defect <= C bound", 180, [] {
    bool ok = true;
    double worst = 0.0;
    for (auto [z, u] : {std::pair{10.0, 4.0}, std::pair{20.0, 6.0}, std::pair{30.0, 8.0}}) {
      const auto w = build_weight(z, u, table());
      const double limit = std::pow(z, u);
      for (std::size_t i = 0; i < w.support().size(); ++i) {
        const auto dd = w.support()[i];
        ok = ok && std::abs(w.weights()[i]) == 1 && w.weights()[i] == mobius(dd) && static_cast<double>(dd) < limit;
        for (auto p : prime_divisors(dd)) ok = ok && static_cast<double>(p) <= z;
      }
      const ZrSchedule sched(z, u);
      for (std::uint64_t n = 1; n <= 100'000; ++n) {
        const auto r = sieve_indicator_defect(n, w, sched, table());
        ok = ok && r.convolved >= r.indicator && r.defect <= kSieveDefectConstant * r.bound;
        if (r.defect > 0) worst = std::max(worst, r.defect / r.bound);
      }
    }
    return Outcome{ok, fmt("max defect/bound %.3g, C = %.4g", worst, kSieveDefectConstant)};
  });

  criterion(8, "L-values and L(1) > 0 for |d| <= 1e4", 300, [] {
    const double pi = std::acos(-1.0), catalan = 0.91596559417721901505;
    const auto chi = build_character(-4);
    const auto l1 = l_value(chi, 1.0, 1'000'000);
    const auto l2 = l_value(chi, 2.0, 1'000'000);
    const auto big = l_value(chi, 1.0, 10'000'000);
    bool ok = std::fabs(l1.value - pi / 4) <= l1.tail_bound && std::fabs(l2.value - catalan) <= l2.tail_bound &&
              big.tail_bound < 1e-6;
    double min_l = 1e300;
    std::uint64_t uncertified = 0;
    for (auto d : fundamental_discriminants(10'000)) {
      const auto c = build_character(d);
      const double closed = l_one_closed_form(c);
      min_l = std::min(min_l, closed);
      const auto ev = l_one_certified(c);
      if (!(ev.value - ev.tail_bound > 0.0)) ++uncertified;
    }
    ok = ok && min_l > 0.0 && uncertified == 0;
    return Outcome{ok, fmt("tail at 1e7 terms %.3g, min L(1) %.4g", big.tail_bound, min_l) +
                           fmt(", %.0f uncertified", static_cast<double>(uncertified))};
  });

  criterion(9, "partition identities q <= 50, x = 1e5", 120, [] {
    double worst = 0.0;
    for (auto d : shipped_config().discriminants) {
      const auto chi = build_character(d);
      const ProgressionContext ctx(table(), chi, 100'000);
      for (std::uint64_t q = 1; q <= 50; ++q) worst = std::max(worst, partition_identity_defects(ctx, 1e5, q).max());
    }
    return Outcome{worst < 1e-9, fmt("max relative defect %.3g < 1e-9", worst)};
  });

  criterion(10, "hyperbola ratios under frozen caps, vanishing guard", 300, [] {
    double coprime = 0.0, prog = 0.0;
    for (std::int64_t d : {-3, -4, 5, 8, -8, 12, -7, 13, -15, -20, 21, 24, -39, 40}) {
      const auto chi = build_character(d);
      const ProgressionContext ctx(table(), chi, 1'000'000);
      for (double x : {1e4, 1e5, 1e6}) {
        coprime = std::max(coprime, std::fabs(lambda_sum_coprime(ctx, x, 1, kDefaultEpsilon).ratio));
        for (std::uint64_t q = 1; q <= 101; ++q) {
          if (static_cast<double>(q) > std::pow(x, 2.0 / 3.0 - kDefaultEpsilon)) continue;
          for (std::uint64_t a = 1; a <= q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            if (q % chi.modulus() == 0 && chi(static_cast<std::int64_t>(a)) == -1) continue;
            prog = std::max(prog, std::fabs(lambda_sum_progression(ctx, x, q, a, kDefaultEpsilon).ratio));
          }
        }
      }
    }
    const auto chi = build_character(-4);
    const ProgressionContext ctx(table(), chi, 1'000'000);
    double vanish = 0.0;
    for (std::uint64_t a : {3, 7}) {
      const auto h = lambda_sum_progression(ctx, 1e6, 8, a, kDefaultEpsilon);
      vanish = std::max(vanish, std::fabs(h.direct) / (1e6 / 8));
    }
    const bool ok = coprime < kCoprimeRatioCap && prog < kProgressionRatioCap && vanish < kVanishingMainGuard;
    return Outcome{ok, fmt("coprime %.3g, ", coprime) + fmt("progression %.3g, ", prog) +
                           fmt("vanishing |direct|/(x/q) %.3g", vanish)};
  });

  criterion(11, "suites give byte-identical CSV across runs", 600, [] {
    const auto cfg = shipped_config();
    std::string differing;
    for (const auto& name : suite_names()) {
      const auto a = run_suite(name, cfg, 1);
      const auto b = run_suite(name, cfg, 4);
      if (a.csv != b.csv || a.csv.empty()) differing += " " + name;
    }
    return Outcome{differing.empty(), differing.empty() ? std::string("all suites identical at jobs 1 and 4")
                                                        : "differing:" + differing};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
