// exsieve: command-line front end for the library. Exit status is 0 when every
// check passes, 1 when a check fails and 2 on errors.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "exsieve/arith.hpp"
#include "exsieve/characters.hpp"
#include "exsieve/error.hpp"
#include "exsieve/experiment.hpp"
#include "exsieve/factor_table.hpp"
#include "exsieve/kloosterman.hpp"
#include "exsieve/lfunctions.hpp"
#include "exsieve/progression_sums.hpp"
#include "exsieve/sieve_weights.hpp"

using namespace exsieve;

namespace {

struct Globals {
  std::string config_path;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string csv_path;
};

std::optional<RunConfig> maybe_config(const Globals& g) {
  if (g.config_path.empty()) return std::nullopt;
  auto cfg = load_config(g.config_path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void emit_csv(const Globals& g, const std::string& csv) {
  if (!g.csv_path.empty()) write_text_file(g.csv_path, csv);
}

std::string f(double v) { return format_real(v); }

int cmd_char(const Globals& g, std::int64_t d, bool check) {
  const auto chi = build_character(d);
  std::printf("character d = %lld, modulus %llu\n", static_cast<long long>(d),
              static_cast<unsigned long long>(chi.modulus()));
  if (!check && g.csv_path.empty()) {
    for (std::uint64_t r = 0; r < std::min<std::uint64_t>(chi.modulus(), 24); ++r)
      std::printf("  chi(%llu) = %d\n", static_cast<unsigned long long>(r), chi.at_residue(r));
    return 0;
  }
  bool ok = true;
  std::string csv = "check_name,status,max_defect\n";
  for (const auto& row : character_invariant_report(chi)) {
    ok = ok && row.passed;
    std::printf("  %-24s %s  %s\n", row.name.c_str(), row.passed ? "pass" : "FAIL", f(row.max_defect).c_str());
    csv += row.name + "," + (row.passed ? "pass" : "FAIL") + "," + f(row.max_defect) + "\n";
  }
  emit_csv(g, csv);
  return ok ? 0 : 1;
}

struct SGrid {
  double lo, hi;
  int n;
};

SGrid parse_s_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw InvalidArgument("--s-grid expects lo:hi:n, got '" + spec + "'");
  SGrid g{std::stod(spec.substr(0, c1)), std::stod(spec.substr(c1 + 1, c2 - c1 - 1)),
          std::stoi(spec.substr(c2 + 1))};
  if (g.n < 1 || !(g.lo <= g.hi)) throw InvalidArgument("--s-grid needs lo <= hi and n >= 1");
  return g;
}

int cmd_lfunc(const Globals& g, std::int64_t d, const std::string& s_grid, std::uint64_t terms) {
  const auto chi = build_character(d);
  const auto grid = parse_s_grid(s_grid);
  std::string csv = "s,value,tail_bound\n";
  for (int i = 0; i < grid.n; ++i) {
    const double s = grid.n == 1 ? grid.lo : grid.lo + (grid.hi - grid.lo) * i / (grid.n - 1);
    const auto e = l_value(chi, s, terms);
    std::printf("L(%s) = %s  +- %s\n", f(s).c_str(), f(e.value).c_str(), f(e.tail_bound).c_str());
    csv += f(s) + "," + f(e.value) + "," + f(e.tail_bound) + "\n";
  }
  emit_csv(g, csv);
  return 0;
}

int cmd_sieve(const Globals& g, double z, double u, std::uint64_t sweep) {
  const auto table = load_or_build_factor_table(std::max<std::uint64_t>(sweep, static_cast<std::uint64_t>(z) + 1));
  const auto w = build_weight(z, u, table);
  const ZrSchedule sched(z, u);
  std::uint64_t below_indicator = 0, over_bound = 0;
  double worst = 0.0;
  std::string csv = "n,indicator,convolved,defect,bound\n";
  for (std::uint64_t n = 1; n <= sweep; ++n) {
    const auto r = sieve_indicator_defect(n, w, sched, table);
    if (r.convolved < r.indicator) ++below_indicator;
    if (r.defect > 0) {
      worst = std::max(worst, r.defect / r.bound);
      if (r.defect > kSieveDefectConstant * r.bound) ++over_bound;
    }
    csv += std::to_string(n) + "," + std::to_string(r.indicator) + "," + std::to_string(r.convolved) + "," +
           f(r.defect) + "," + f(r.bound) + "\n";
  }
  std::printf("z = %s, u = %s: support %zu, n <= %llu\n", f(z).c_str(), f(u).c_str(), w.support().size(),
              static_cast<unsigned long long>(sweep));
  std::printf("  upper-bound violations %llu, max defect/bound %s (cap %s), over cap %llu\n",
              static_cast<unsigned long long>(below_indicator), f(worst).c_str(), f(kSieveDefectConstant).c_str(),
              static_cast<unsigned long long>(over_bound));
  emit_csv(g, csv);
  return below_indicator == 0 && over_bound == 0 ? 0 : 1;
}

int cmd_nkl(const Globals& g, std::uint64_t cases) {
  RunConfig cfg;
  cfg.table_limit = 2;
  cfg.discriminants = {-3, -4, 5, 8, -8, 12};
  cfg.x_grid = {2};
  cfg.q_grid = {1};
  cfg.random_cases = cases;
  if (auto c = maybe_config(g)) {
    cfg = *c;
    cfg.random_cases = cases;
  }
  if (g.seed) cfg.seed = *g.seed;
  std::string csv = "K,L,delta,q,a,D,r,direct,M1,M2,E,residual\n";
  bool ok = true;
  double worst = 0.0;
  const auto tuples = nkl_random_tuples(cfg);
  for (const auto& p : tuples) {
    const auto dec = nkl_decompose(p);
    const double res_abs = std::fabs(dec.residual());
    ok = ok && res_abs < 1e-6;
    worst = std::max(worst, res_abs);
    csv += std::to_string(p.K) + "," + std::to_string(p.L) + "," + f(p.delta) + "," + std::to_string(p.q) + "," +
           std::to_string(p.a) + "," + std::to_string(p.D) + "," + std::to_string(p.r) + "," +
           std::to_string(dec.direct) + "," + f(dec.M1) + "," + f(dec.M2) + "," + f(dec.E) + "," +
           f(dec.residual()) + "\n";
  }
  std::printf("N(K,L) = M1 + M2 + E over %llu cases: max |residual| %s\n", static_cast<unsigned long long>(tuples.size()),
              f(worst).c_str());
  emit_csv(g, csv);
  return ok ? 0 : 1;
}

int cmd_decompose(const Globals& g, double x, std::uint64_t q, std::uint64_t a, std::int64_t d, double z, double eta,
                  double c_eps) {
  const auto chi = build_character(d);
  const auto X = static_cast<std::uint64_t>(std::floor(x));
  const auto table = load_or_build_factor_table(std::max<std::uint64_t>(X, 2));
  const ProgressionContext ctx(table, chi, X);
  const auto rep = equidistribution_error_report(ctx, x, q, a, z, eta, c_eps);
  const auto& r = rep.decomposition;
  const double residual = std::fabs(r.lhs_minus_rhs);
  const bool ok = residual <= r.closure_tolerance();
  std::printf("psi(x;q,a) = %s, main = %s\n", f(r.psi_prog).c_str(), f(r.main).c_str());
  std::printf("Delta = %s, S1 = %s, S2 = %s, correction = %s\n", f(r.Delta).c_str(), f(r.S1).c_str(),
              f(r.S2).c_str(), f(r.correction).c_str());
  std::printf("closure residual %s (tolerance %s): %s\n", f(residual).c_str(), f(r.closure_tolerance()).c_str(),
              ok ? "pass" : "FAIL");
  std::printf("measured error %s, envelope %s, ratio %s\n", f(rep.measured).c_str(), f(rep.envelope).c_str(),
              f(rep.ratio).c_str());
  std::string csv = "x,q,a,disc,z,psi_prog,main,Delta,S1,S2,correction,residual,measured_err,envelope,ratio\n";
  csv += f(x) + "," + std::to_string(q) + "," + std::to_string(a) + "," + std::to_string(d) + "," + f(z) + "," +
         f(r.psi_prog) + "," + f(r.main) + "," + f(r.Delta) + "," + f(r.S1) + "," + f(r.S2) + "," +
         f(r.correction) + "," + f(r.lhs_minus_rhs) + "," + f(rep.measured) + "," + f(rep.envelope) + "," +
         f(rep.ratio) + "\n";
  emit_csv(g, csv);
  return ok ? 0 : 1;
}

int cmd_suite(const Globals& g, const std::string& name) {
  auto cfg = maybe_config(g);
  if (!cfg) throw InvalidArgument("suite needs --config");
  std::vector<std::string> names;
  if (name == "all")
    names = suite_names();
  else
    names = {name};
  bool ok = true;
  std::string combined;
  for (const auto& n : names) {
    const auto res = run_suite(n, *cfg, g.jobs);
    ok = ok && res.all_passed();
    std::printf("%-12s %llu/%llu passed, max residual %s, %.2f s\n", n.c_str(),
                static_cast<unsigned long long>(res.cases_passed), static_cast<unsigned long long>(res.cases_run),
                f(res.max_residual).c_str(), res.wall_time.count());
    combined += combined.empty() ? res.csv : res.csv.substr(res.csv.find('\n') + 1);
  }
  std::string path = g.csv_path.empty() ? cfg->output_path : g.csv_path;
  if (!path.empty()) write_text_file(path, combined);
  return ok ? 0 : 1;
}

int cmd_cache(const Globals& g, const std::string& action, std::uint64_t limit) {
  RunConfig cfg;
  if (auto c = maybe_config(g)) cfg = *c;
  if (limit) cfg.table_limit = limit;
  if (cfg.table_limit < 2 && action != "purge") throw InvalidArgument("cache needs --limit or a config with table_limit");
  const auto st = cache_manage(parse_cache_action(action), cfg);
  std::printf("%s\n", st.message.c_str());
  return st.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exsieve: desk-scale experiments on primes in progressions and real characters"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Run configuration (key = value lines)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--csv", g.csv_path, "Write CSV output here");

  std::int64_t disc = -4;
  bool check = false;
  auto* c_char = app.add_subcommand("char", "Build a real primitive character and report its invariants");
  c_char->add_option("--disc", disc, "Fundamental discriminant")->required();
  c_char->add_flag("--check", check, "Run the invariant report");

  std::string s_grid = "0.5:2:16";
  std::uint64_t terms = 1'000'000;
  auto* c_lfunc = app.add_subcommand("lfunc", "Evaluate L(s, chi) on a real grid with a tail bound");
  c_lfunc->add_option("--disc", disc, "Fundamental discriminant")->required();
  c_lfunc->add_option("--s-grid", s_grid, "lo:hi:n");
  c_lfunc->add_option("--terms", terms, "Partial-sum length");

  double z = 10, u = 4;
  std::uint64_t sweep = 100000;
  auto* c_sieve = app.add_subcommand("sieve", "Beta-sieve weights and the rough-number indicator defect");
  c_sieve->add_option("--z", z, "Sifting level")->required();
  c_sieve->add_option("--u", u, "Support exponent")->required();
  c_sieve->add_option("--sweep", sweep, "Check n up to this bound");

  std::uint64_t cases = 100;
  auto* c_nkl = app.add_subcommand("nkl", "Random N(K,L) = M1 + M2 + E decompositions");
  c_nkl->add_option("--cases", cases, "Number of seeded tuples");

  double x = 1e5, eta = 100, c_eps = 1.0;
  std::uint64_t q = 1, a = 1;
  auto* c_dec = app.add_subcommand("decompose", "Split psi(x;q,a) into main term, Delta, S1, S2 and corrections");
  c_dec->add_option("--x", x)->required();
  c_dec->add_option("--q", q)->required();
  c_dec->add_option("--a", a)->required();
  c_dec->add_option("--disc", disc)->required();
  c_dec->add_option("--z", z)->required();
  c_dec->add_option("--eta", eta, "Assumed quality");
  c_dec->add_option("--Ceps", c_eps, "Constant in the error envelope");

  std::string suite_name;
  auto* c_suite = app.add_subcommand("suite", "Run an invariant suite over the config grids");
  c_suite->add_option("name", suite_name, "identities, characters, kloosterman, sieve, hyperbola, decompose, lfunc or all")
      ->required();

  std::string action;
  std::uint64_t limit = 0;
  auto* c_cache = app.add_subcommand("cache", "Build, verify or purge the factor-table cache");
  c_cache->add_option("action", action, "build, verify or purge")->required();
  c_cache->add_option("--limit", limit, "Table limit (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count()) g.seed = seed;

  try {
    if (*c_char) return cmd_char(g, disc, check);
    if (*c_lfunc) return cmd_lfunc(g, disc, s_grid, terms);
    if (*c_sieve) return cmd_sieve(g, z, u, sweep);
    if (*c_nkl) return cmd_nkl(g, cases);
    if (*c_dec) return cmd_decompose(g, x, q, a, disc, z, eta, c_eps);
    if (*c_suite) return cmd_suite(g, suite_name);
    if (*c_cache) return cmd_cache(g, action, limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
