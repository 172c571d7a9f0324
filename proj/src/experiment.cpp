#include "exsieve/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "exsieve/arith.hpp"
#include "exsieve/characters.hpp"
#include "exsieve/error.hpp"
#include "exsieve/factor_table.hpp"
#include "exsieve/kloosterman.hpp"
#include "exsieve/lfunctions.hpp"
#include "exsieve/progression_sums.hpp"
#include "exsieve/sieve_weights.hpp"

namespace exsieve {

// ---- config ---------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct ParseError {
  std::string what;
};

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError{"'" + std::string(s) + "' is not a real number"};
  return v;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return v;
  // Accept integral reals such as 1e6.
  const double d = parse_real(s);
  if (d != std::floor(d) || std::fabs(d) > 9.0e18) throw ParseError{"'" + std::string(s) + "' is not an integer"};
  return static_cast<std::int64_t>(d);
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t u = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
  if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return u;
  const std::int64_t v = parse_int(s);
  if (v < 0) throw ParseError{"'" + std::string(s) + "' is negative"};
  return static_cast<std::uint64_t>(v);
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view s, F&& f) {
  std::vector<T> out;
  for (auto item : split_list(s)) {
    if (item.empty()) throw ParseError{"empty list element"};
    out.push_back(f(item));
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
  RunConfig cfg;
  bool have_limit = false, have_discs = false, have_x = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidArgument(where + "missing key");
    try {
      if (key == "table_limit") {
        cfg.table_limit = parse_uint(value);
        have_limit = true;
      } else if (key == "discriminants") {
        cfg.discriminants = parse_list<std::int64_t>(value, parse_int);
        have_discs = true;
      } else if (key == "x_grid") {
        cfg.x_grid = parse_list<double>(value, parse_real);
        have_x = true;
      } else if (key == "q_grid") {
        cfg.q_grid = parse_list<std::uint64_t>(value, parse_uint);
      } else if (key == "z_grid") {
        cfg.z_grid = parse_list<double>(value, parse_real);
      } else if (key == "u_grid") {
        cfg.u_grid = parse_list<double>(value, parse_real);
      } else if (key == "epsilon") {
        cfg.epsilon = parse_real(value);
      } else if (key == "eta") {
        cfg.eta = parse_real(value);
      } else if (key == "seed") {
        cfg.seed = parse_uint(value);
      } else if (key == "grid_points") {
        cfg.grid_points = parse_uint(value);
      } else if (key == "random_cases") {
        cfg.random_cases = parse_uint(value);
      } else if (key == "output_path") {
        cfg.output_path = std::string(value);
      } else if (key == "cache_dir") {
        cfg.cache_dir = std::string(value);
      } else {
        cfg.warnings.push_back(where + "unknown key '" + std::string(key) + "' ignored");
      }
    } catch (const ParseError& e) {
      throw InvalidArgument(where + std::string(key) + ": " + e.what);
    }
  }
  std::string missing;
  if (!have_limit) missing += " table_limit";
  if (!have_discs) missing += " discriminants";
  if (!have_x) missing += " x_grid";
  if (!missing.empty()) throw InvalidArgument(std::string(source) + ": missing required keys:" + missing);
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidArgument("config field " + field + ": " + why);
  };
  if (cfg.discriminants.empty()) fail("discriminants", "must be non-empty");
  if (cfg.x_grid.empty()) fail("x_grid", "must be non-empty");
  if (cfg.q_grid.empty()) fail("q_grid", "must be non-empty");
  if (cfg.z_grid.empty()) fail("z_grid", "must be non-empty");
  if (cfg.u_grid.empty()) fail("u_grid", "must be non-empty");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.01)) fail("epsilon", "must lie in (0, 0.01], got " + format_real(cfg.epsilon));
  if (!(cfg.eta > 1.0)) fail("eta", "must exceed 1");
  if (cfg.table_limit < 2 || cfg.table_limit > kMaxTableLimit) fail("table_limit", "out of range");
  for (double x : cfg.x_grid) {
    if (!(x >= 2.0)) fail("x_grid", "entries must be at least 2");
    if (x > static_cast<double>(cfg.table_limit))
      fail("table_limit", "must be at least max(x_grid) = " + format_real(x));
  }
  for (auto q : cfg.q_grid)
    if (q == 0) fail("q_grid", "entries must be positive");
  for (double z : cfg.z_grid)
    if (!(z > 1.0) || z > static_cast<double>(cfg.table_limit)) fail("z_grid", "entries must lie in (1, table_limit]");
  for (double u : cfg.u_grid)
    if (!(u > 2.0)) fail("u_grid", "entries must exceed 2");
  for (auto d : cfg.discriminants)
    if (!is_fundamental_discriminant(d))
      fail("discriminants", std::to_string(d) + " is not fundamental: " + fundamental_discriminant_defect(d));
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- suites ---------------------------------------------------------------

namespace {

struct Outcome {
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Passes when residual <= tolerance.
Outcome at_most(double residual, double tolerance) { return {residual, tolerance, residual <= tolerance}; }

struct Case {
  std::string name;
  std::string params;
  std::function<Outcome()> run;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-case generator, independent of scheduling order.
std::mt19937_64 case_rng(std::uint64_t seed, std::uint64_t stream) { return std::mt19937_64(splitmix64(seed ^ splitmix64(stream))); }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

std::uint64_t random_unit(std::mt19937_64& rng, std::uint64_t q) {
  if (q == 1) return 1;
  while (true) {
    const std::uint64_t a = 1 + below(rng, q - 1);
    if (std::gcd(a, q) == 1) return a;
  }
}

std::uint64_t trial_spf(std::uint64_t n) {
  if (n < 2) return 0;
  if (n % 2 == 0) return 2;
  for (std::uint64_t p = 3; p * p <= n; p += 2)
    if (n % p == 0) return p;
  return n;
}

FactorTable obtain_table(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) {
    const auto file = cache_file_name(cfg.cache_dir, cfg.table_limit);
    if (std::filesystem::exists(file)) return read_factor_table(file);
    auto table = build_factor_table(cfg.table_limit);
    std::filesystem::create_directories(cfg.cache_dir);
    write_factor_table(table, file);
    return table;
  }
  return load_or_build_factor_table(cfg.table_limit);
}

double max_x(const RunConfig& cfg) { return *std::max_element(cfg.x_grid.begin(), cfg.x_grid.end()); }

std::string kv(std::string_view k, double v) { return std::string(k) + "=" + format_real(v); }
std::string kv(std::string_view k, std::int64_t v) { return std::string(k) + "=" + std::to_string(v); }
std::string kv(std::string_view k, std::uint64_t v) { return std::string(k) + "=" + std::to_string(v); }

// Shared state for one suite run; cases hold pointers into it.
struct Workspace {
  explicit Workspace(const RunConfig& c) : cfg(c), table(obtain_table(c)) {}
  const RunConfig& cfg;
  FactorTable table;
  std::map<std::int64_t, std::unique_ptr<RealPrimitiveCharacter>> chars;
  std::map<std::int64_t, std::unique_ptr<ProgressionContext>> contexts;

  const RealPrimitiveCharacter& chi(std::int64_t d) {
    auto& slot = chars[d];
    if (!slot) slot = std::make_unique<RealPrimitiveCharacter>(build_character(d));
    return *slot;
  }
  const ProgressionContext& context(std::int64_t d, std::uint64_t N) {
    auto& slot = contexts[d];
    if (!slot) slot = std::make_unique<ProgressionContext>(table, chi(d), N);
    return *slot;
  }
};

void identities_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const std::uint64_t N = static_cast<std::uint64_t>(max_x(cfg));
  const auto* table = &ws.table;

  const std::uint64_t Nexact = std::min<std::uint64_t>(N, 100000);
  for (auto kind : {ArithKind::VonMangoldt, ArithKind::Mobius, ArithKind::Totient, ArithKind::Divisor}) {
    cases.push_back({"arith_exact", std::string("kind=") + std::string(to_string(kind)) + " " + kv("N", Nexact), [=] {
                       const auto t = arith_table(kind, Nexact, *table);
                       double worst = 0.0;
                       for (std::uint64_t n = 1; n <= Nexact; ++n) {
                         double oracle = 0.0;
                         switch (kind) {
                           case ArithKind::VonMangoldt: {
                             const auto ps = prime_divisors(n);
                             oracle = ps.size() == 1 ? std::log(static_cast<double>(ps[0])) : 0.0;
                             break;
                           }
                           case ArithKind::Mobius: oracle = mobius(n); break;
                           case ArithKind::Totient: oracle = static_cast<double>(totient(n)); break;
                           default: oracle = static_cast<double>(divisor_count(n)); break;
                         }
                         worst = std::max(worst, std::fabs(t[n] - oracle));
                       }
                       return at_most(worst, 1e-12);
                     }});
  }
  for (double x : cfg.x_grid) {
    cases.push_back({"chebyshev", kv("x", x), [=] {
                       const double psi = psi_progression(x, 1, 1, *table);
                       return at_most(std::fabs(psi / x - 1.0), 0.1);
                     }});
  }
  for (auto d : cfg.discriminants) {
    const auto* chi = &ws.chi(d);
    const auto* ctx = &ws.context(d, N);
    cases.push_back({"lambdaprime_identity", kv("d", d) + " " + kv("N", N),
                     [=] { return at_most(verify_lL_identity(*chi, N, *table), 1e-9 * std::log(static_cast<double>(N))); }});
    cases.push_back({"lambda_nonnegative", kv("d", d) + " " + kv("N", N), [=] {
                       double lowest = 0.0;
                       for (std::uint64_t n = 1; n <= N; ++n) lowest = std::min(lowest, ctx->lambda()[n]);
                       return at_most(-lowest, 0.0);
                     }});
    for (auto q : cfg.q_grid) {
      cases.push_back({"partition", kv("d", d) + " " + kv("q", q) + " " + kv("x", static_cast<double>(N)),
                       [=] { return at_most(partition_identity_defects(*ctx, static_cast<double>(N), q).max(), 1e-9); }});
    }
  }
}

void characters_cases(Workspace& ws, std::vector<Case>& cases) {
  for (auto d : ws.cfg.discriminants) {
    const auto* chi = &ws.chi(d);
    auto rows = std::make_shared<const std::vector<CheckRow>>(character_invariant_report(*chi));
    for (std::size_t i = 0; i < rows->size(); ++i)
      cases.push_back({(*rows)[i].name, kv("d", d), [=] { return Outcome{(*rows)[i].max_defect, 0.0, (*rows)[i].passed}; }});
  }
}

std::vector<std::int64_t> small_modulus_discriminants(const RunConfig& cfg) {
  std::vector<std::int64_t> out;
  for (auto d : cfg.discriminants)
    if (std::llabs(d) <= 12) out.push_back(d);
  if (out.empty()) out = {-3, -4, 5, 8, -8, 12};
  return out;
}

void kloosterman_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const std::uint64_t seed = cfg.seed;
  const std::uint64_t trials = cfg.random_cases;
  for (auto c : cfg.q_grid) {
    cases.push_back({"weil_bound", kv("c", c) + " " + kv("samples", trials), [=] {
                       const KloostermanEvaluator eval(c);
                       auto rng = case_rng(seed, 0x1000000 + c);
                       double worst = 0.0;
                       for (std::uint64_t i = 0; i < trials; ++i) {
                         const auto m = static_cast<std::int64_t>(below(rng, 4 * c + 1));
                         const auto n = static_cast<std::int64_t>(below(rng, 4 * c + 1));
                         const auto w = weil_check(eval, m, n);
                         worst = std::max(worst, std::fabs(w.value) / w.envelope);
                       }
                       return at_most(worst, 1.0 + 1e-9);
                     }});
    cases.push_back({"symmetry", kv("c", c) + " " + kv("samples", trials), [=] {
                       const KloostermanEvaluator eval(c);
                       auto rng = case_rng(seed, 0x2000000 + c);
                       double worst = 0.0;
                       for (std::uint64_t i = 0; i < trials; ++i) {
                         const auto m = static_cast<std::int64_t>(below(rng, c));
                         const auto n = static_cast<std::int64_t>(below(rng, c));
                         worst = std::max(worst, std::fabs(eval(m, n).value - eval(n, m).value));
                       }
                       return at_most(worst, 1e-9);
                     }});
    cases.push_back({"ramanujan", kv("q", c) + " s=1..100", [=] {
                       double failures = 0;
                       for (std::int64_t s = 1; s <= 100; ++s) failures += ramanujan_identity_check(s, c) ? 0 : 1;
                       return at_most(failures, 0.0);
                     }});
  }
  for (const auto& p : nkl_random_tuples(cfg)) {
    const std::string params = kv("K", p.K) + " " + kv("L", p.L) + " " + kv("delta", p.delta) + " " + kv("q", p.q) +
                               " " + kv("a", p.a) + " " + kv("D", p.D) + " " + kv("r", p.r);
    cases.push_back({"nkl_closure", params, [=] { return at_most(std::fabs(nkl_decompose(p).residual()), 1e-6); }});
  }
}

void sieve_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const auto* table = &ws.table;
  const std::uint64_t N = std::min<std::uint64_t>(cfg.table_limit, 100000);
  for (double z : cfg.z_grid)
    for (double u : cfg.u_grid) {
      auto w = std::make_shared<const BetaSieveWeight>(build_weight(z, u, *table));
      const std::string params = kv("z", z) + " " + kv("u", u);
      cases.push_back({"support_invariants", params + " " + kv("support", static_cast<std::uint64_t>(w->support().size())), [=] {
                         double violations = 0;
                         const auto& primes = w->sifting_primes();
                         for (std::size_t i = 0; i < w->support().size(); ++i) {
                           std::uint64_t d = w->support()[i];
                           std::vector<std::uint64_t> desc;
                           for (auto it = primes.rbegin(); it != primes.rend(); ++it)
                             if (d % *it == 0) desc.push_back(*it);
                           std::uint64_t prod = 1;
                           for (auto p : desc) prod *= p;
                           const int mu = (desc.size() % 2 == 0) ? 1 : -1;
                           if (prod != d || w->weights()[i] != mu || !beta_sieve_member(desc, z, u)) ++violations;
                           if (d > 1 && std::log(static_cast<double>(d)) >= w->log_support_limit()) ++violations;
                         }
                         return at_most(violations, 0.0);
                       }});
      cases.push_back({"upper_bound", params + " " + kv("N", N), [=] {
                         const ZrSchedule sched(z, u);
                         double violations = 0;
                         for (std::uint64_t n = 1; n <= N; ++n) {
                           const auto r = sieve_indicator_defect(n, *w, sched, *table);
                           if (r.convolved < r.indicator) ++violations;
                         }
                         return at_most(violations, 0.0);
                       }});
      cases.push_back({"defect_bound", params + " " + kv("N", N), [=] {
                         const ZrSchedule sched(z, u);
                         double worst = 0.0;
                         for (std::uint64_t n = 1; n <= N; ++n) {
                           const auto r = sieve_indicator_defect(n, *w, sched, *table);
                           if (r.defect > 0) worst = std::max(worst, r.defect / r.bound);
                         }
                         return at_most(worst, kSieveDefectConstant);
                       }});
      cases.push_back({"zr_monotone", params, [=] {
                         const ZrSchedule sched(z, u);
                         double violations = 0;
                         for (int r = 0; r <= 60; ++r)
                           if (!(sched.log_at(r + 1) < sched.log_at(r))) ++violations;
                         return at_most(violations, 0.0);
                       }});
    }
}

void hyperbola_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const std::uint64_t N = static_cast<std::uint64_t>(max_x(cfg));
  const double eps = cfg.epsilon;
  for (auto d : cfg.discriminants) {
    const auto* ctx = &ws.context(d, N);
    const auto& chi = ws.chi(d);
    for (double x : cfg.x_grid) {
      cases.push_back({"coprime_ratio", kv("d", d) + " " + kv("x", x), [=] {
                         return at_most(std::fabs(lambda_sum_coprime(*ctx, x, 1, eps).ratio), kCoprimeRatioCap);
                       }});
      for (auto q : cfg.q_grid) {
        if (static_cast<double>(q) > std::pow(x, 2.0 / 3.0 - eps)) continue;
        auto rng = case_rng(cfg.seed, (static_cast<std::uint64_t>(d + 1000000) << 32) ^ (q << 20) ^
                                          static_cast<std::uint64_t>(x));
        std::vector<std::uint64_t> as{1};
        if (q > 2) as.push_back(q - 1);
        if (q > 3) as.push_back(random_unit(rng, q));
        std::sort(as.begin(), as.end());
        as.erase(std::unique(as.begin(), as.end()), as.end());
        for (auto a : as) {
          const std::string params = kv("d", d) + " " + kv("x", x) + " " + kv("q", q) + " " + kv("a", a);
          const bool vanishing = q % chi.modulus() == 0 && chi(static_cast<std::int64_t>(a)) == -1;
          if (vanishing) {
            cases.push_back({"vanishing_main", params, [=] {
                               const auto h = lambda_sum_progression(*ctx, x, q, a, eps);
                               return at_most(std::fabs(h.direct), kVanishingMainGuard * x / static_cast<double>(q));
                             }});
          } else {
            cases.push_back({"progression_ratio", params, [=] {
                               return at_most(std::fabs(lambda_sum_progression(*ctx, x, q, a, eps).ratio),
                                              kProgressionRatioCap);
                             }});
          }
        }
      }
    }
  }
}

struct GridPoint {
  double x;
  std::uint64_t q;
  std::uint64_t a;
  double z;
  std::int64_t d;
};

// Cycles x fastest, then z, then d; q and a come from the seeded stream of the point index.
std::vector<GridPoint> decomposition_grid(const RunConfig& cfg) {
  std::vector<GridPoint> pts;
  const auto nx = cfg.x_grid.size(), nz = cfg.z_grid.size(), nd = cfg.discriminants.size();
  for (std::uint64_t i = 0; i < cfg.grid_points; ++i) {
    auto rng = case_rng(cfg.seed, 0x4000000 + i);
    GridPoint p;
    p.x = cfg.x_grid[i % nx];
    p.z = cfg.z_grid[(i / nx) % nz];
    p.d = cfg.discriminants[(i / (nx * nz)) % nd];
    p.q = cfg.q_grid[below(rng, cfg.q_grid.size())];
    p.a = random_unit(rng, p.q);
    pts.push_back(p);
  }
  return pts;
}

void decompose_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const std::uint64_t N = static_cast<std::uint64_t>(max_x(cfg));
  for (const auto& p : decomposition_grid(cfg)) {
    const auto* ctx = &ws.context(p.d, N);
    const std::string params =
        kv("d", p.d) + " " + kv("x", p.x) + " " + kv("q", p.q) + " " + kv("a", p.a) + " " + kv("z", p.z);
    cases.push_back({"closure", params, [=] {
                       const auto r = decomposition_pipeline(*ctx, p.x, p.q, p.a, p.z);
                       return at_most(std::fabs(r.lhs_minus_rhs), r.closure_tolerance());
                     }});
  }
}

void lfunc_cases(Workspace& ws, std::vector<Case>& cases) {
  const auto& cfg = ws.cfg;
  const auto* table = &ws.table;
  for (auto d : cfg.discriminants) {
    const auto* chi = &ws.chi(d);
    cases.push_back({"l1_positive", kv("d", d), [=] {
                       const auto e = l_one_certified(*chi);
                       // residual: minus the certified lower bound
                       return Outcome{-(e.value - e.tail_bound), 0.0, e.value - e.tail_bound > 0.0};
                     }});
    const std::uint64_t T = std::max<std::uint64_t>(chi->modulus() * 1000, 100000);
    for (double s : {0.75, 1.0, 1.5, 2.0}) {
      cases.push_back({"doubling", kv("d", d) + " " + kv("s", s) + " " + kv("terms", T), [=] {
                         const auto a = l_value(*chi, s, T);
                         const auto b = l_value(*chi, s, 2 * T);
                         return at_most(std::fabs(a.value - b.value), a.tail_bound);
                       }});
    }
    cases.push_back({"closed_form", kv("d", d) + " " + kv("terms", T), [=] {
                       const auto e = l_value(*chi, 1.0, T);
                       return at_most(std::fabs(e.value - l_one_closed_form(*chi)), e.tail_bound);
                     }});
    cases.push_back({"zero_scan", kv("d", d) + " s=[0.5,1]", [=] {
                       const std::uint64_t terms = std::max<std::uint64_t>(chi->modulus() * 100, 100000);
                       const auto rep = scan_real_zeros(*chi, 0.5, 1.0, 50, 1e-10, terms);
                       if (!rep.beta) return Outcome{0.0, 0.0, true};
                       const double at_beta = std::fabs(l_value(*chi, *rep.beta, terms).value);
                       const double cap = std::fabs(rep.value_lo) + std::fabs(rep.value_hi);
                       const bool ok = at_beta <= cap && rep.s_hi - rep.s_lo <= rep.tolerance;
                       return Outcome{at_beta, cap, ok};
                     }});
    if (chi->modulus() == 4) {
      const double z = std::min<double>(100000.0, static_cast<double>(cfg.table_limit));
      cases.push_back({"euler_product", kv("d", d) + " " + kv("z", z), [=] {
                         const double prod = sifted_euler_product(*chi, z, *table);
                         return at_most(std::fabs(prod * l_one_closed_form(*chi) - 1.0), 0.05);
                       }});
    }
  }
}

using CaseBuilder = void (*)(Workspace&, std::vector<Case>&);

const std::vector<std::pair<std::string, CaseBuilder>>& registry() {
  static const std::vector<std::pair<std::string, CaseBuilder>> r{
      {"identities", identities_cases}, {"characters", characters_cases}, {"kloosterman", kloosterman_cases},
      {"sieve", sieve_cases},           {"hyperbola", hyperbola_cases},   {"decompose", decompose_cases},
      {"lfunc", lfunc_cases}};
  return r;
}

}  // namespace

std::vector<NklParams> nkl_random_tuples(const RunConfig& cfg) {
  const auto discs = small_modulus_discriminants(cfg);
  std::vector<NklParams> out;
  for (std::uint64_t i = 0; i < cfg.random_cases; ++i) {
    auto rng = case_rng(cfg.seed, 0x3000000 + i);
    NklParams p;
    p.q = 1 + below(rng, 30);
    p.a = random_unit(rng, p.q);
    const auto d = discs[below(rng, discs.size())];
    p.D = static_cast<std::uint64_t>(std::llabs(d));
    p.r = random_unit(rng, p.D);
    p.K = 1 + below(rng, 50);
    p.L = 1 + below(rng, 50);
    p.delta = static_cast<double>(1 + below(rng, 1000)) / 1000.0;
    out.push_back(p);
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, _] : registry()) v.push_back(n);
    return v;
  }();
  return names;
}

SuiteResult run_suite(std::string_view name, const RunConfig& cfg, unsigned jobs) {
  CaseBuilder builder = nullptr;
  for (const auto& [n, b] : registry())
    if (n == name) builder = b;
  if (!builder) throw InvalidArgument("unknown suite '" + std::string(name) + "'");
  validate_config(cfg);

  const auto start = std::chrono::steady_clock::now();
  const std::string suite(name);
  Workspace ws(cfg);
  std::vector<Case> cases;
  try {
    builder(ws, cases);
  } catch (const std::exception& e) {
    throw std::runtime_error("suite " + suite + ": " + e.what());
  }

  std::vector<Outcome> outcomes(cases.size());
  std::vector<std::string> errors(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        outcomes[i] = cases[i].run();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cases.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < cases.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("suite " + suite + ", case " + cases[i].name + " (" + cases[i].params + "): " + errors[i]);

  SuiteResult res;
  res.suite_name = suite;
  std::string csv = "suite,case,params,residual,tolerance,status\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& o = outcomes[i];
    ++res.cases_run;
    if (o.passed) ++res.cases_passed;
    if (std::isfinite(o.residual)) res.max_residual = std::max(res.max_residual, o.residual);
    csv += suite + "," + cases[i].name + "," + cases[i].params + "," + format_real(o.residual) + "," +
           format_real(o.tolerance) + "," + (o.passed ? "pass" : "FAIL") + "\n";
  }
  res.csv = std::move(csv);
  res.wall_time = std::chrono::steady_clock::now() - start;
  return res;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ResourceError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---- cache ----------------------------------------------------------------

CacheAction parse_cache_action(std::string_view label) {
  if (label == "build") return CacheAction::Build;
  if (label == "verify") return CacheAction::Verify;
  if (label == "purge") return CacheAction::Purge;
  throw InvalidArgument("unknown cache action '" + std::string(label) + "' (expected build, verify or purge)");
}

std::filesystem::path resolve_cache_dir(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (auto env = cache_dir_from_env()) return *env;
  throw InvalidArgument("no cache directory: set cache_dir in the config or EXSIEVE_CACHE_DIR");
}

CacheStatus cache_manage(CacheAction action, const RunConfig& cfg) {
  const auto dir = resolve_cache_dir(cfg);
  CacheStatus st;
  switch (action) {
    case CacheAction::Build: {
      std::filesystem::create_directories(dir);
      st.file = cache_file_name(dir, cfg.table_limit);
      write_factor_table(build_factor_table(cfg.table_limit), st.file);
      st.message = "built " + st.file.string();
      break;
    }
    case CacheAction::Verify: {
      st.file = cache_file_name(dir, cfg.table_limit);
      if (!std::filesystem::exists(st.file)) throw InvalidArgument("no cache file " + st.file.string());
      const auto table = read_factor_table(st.file);
      const std::uint64_t limit = table.limit();
      const std::uint64_t samples = std::min<std::uint64_t>(limit - 1, std::max<std::uint64_t>(1000, (limit + 1) / 100));
      auto rng = case_rng(cfg.seed, 0x5000000);
      for (std::uint64_t i = 0; i < samples; ++i) {
        const std::uint64_t n = 2 + below(rng, limit - 1);
        ++st.checked;
        if (table.spf(n) != trial_spf(n)) ++st.mismatches;
      }
      st.ok = st.mismatches == 0;
      st.message = "verified " + std::to_string(st.checked) + " sampled entries of " + st.file.string() + ", " +
                   std::to_string(st.mismatches) + " mismatches";
      break;
    }
    case CacheAction::Purge: {
      st.file = dir;
      if (std::filesystem::is_directory(dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
          const auto fname = entry.path().filename().string();
          if (entry.is_regular_file() && fname.rfind("spf_", 0) == 0 && entry.path().extension() == ".bin") {
            std::filesystem::remove(entry.path());
            ++st.removed;
          }
        }
      }
      st.message = "removed " + std::to_string(st.removed) + " files from " + dir.string();
      break;
    }
  }
  return st;
}

}  // namespace exsieve
