#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "exsieve/kloosterman.hpp"

namespace exsieve {

// Regression caps frozen from the calibration run (tests/calibration.cpp),
// about twice the observed maxima:
//   sieve defect/bound over n <= 1e5        0.03125  at (z, u) = (30, 4), 0 elsewhere
//   coprime hyperbola error/envelope         0.0278
//   progression hyperbola error/envelope     0.0387
//   |direct| / (x/q) when 1 + chi(a) = 0     0 (lambda vanishes on that class)
// They guard against drift; they are not constants from any theorem.
inline constexpr double kSieveDefectConstant = 0.0625;
inline constexpr double kCoprimeRatioCap = 0.05;
inline constexpr double kProgressionRatioCap = 0.08;
inline constexpr double kVanishingMainGuard = 0.5;  // |direct| < guard * x/q when 1 + chi(a) = 0

struct RunConfig {
  std::uint64_t table_limit = 0;
  std::vector<std::int64_t> discriminants;
  std::vector<double> x_grid;
  std::vector<std::uint64_t> q_grid{1, 3, 4, 5, 7, 8, 12, 15, 20, 24, 40, 60, 97, 101};
  std::vector<double> z_grid{5, 10, 30};
  std::vector<double> u_grid{4, 6, 8};
  double epsilon = 0.005;
  double eta = 100.0;
  std::uint64_t seed = 1;
  std::uint64_t grid_points = 200;
  std::uint64_t random_cases = 100;
  std::string output_path;
  std::string cache_dir;
  std::vector<std::string> warnings;  // unknown keys, one line each
};

// Line-based "key = value" text; lists are comma-separated, '#' starts a
// comment. Required keys: table_limit, discriminants, x_grid. Unknown keys
// are recorded in warnings. Throws InvalidArgument with the line number on
// parse failures, listing every missing required key, or naming the field
// whose invariant fails.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
void validate_config(const RunConfig& cfg);

// Fixed %.17g rendering so CSV bytes depend only on the values.
std::string format_real(double v);

struct SuiteResult {
  std::string suite_name;
  std::uint64_t cases_run = 0;
  std::uint64_t cases_passed = 0;
  double max_residual = 0.0;
  std::chrono::duration<double> wall_time{0.0};
  std::string csv;  // header plus one row per case, in case order
  bool all_passed() const { return cases_passed == cases_run; }
};

const std::vector<std::string>& suite_names();

// Runs every invariant of the named module over the config grids on a pool of
// `jobs` workers. Rows come out in case order whatever the completion order.
// Throws InvalidArgument for an unknown suite; module errors propagate with
// the suite and case prepended.
SuiteResult run_suite(std::string_view name, const RunConfig& cfg, unsigned jobs = 1);

// Seeded N(K,L) tuples: q <= 30, K, L <= 50, D from the config discriminants
// with |d| <= 12 (a fixed set if there are none).
std::vector<NklParams> nkl_random_tuples(const RunConfig& cfg);

// Writes text to path via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

enum class CacheAction { Build, Verify, Purge };
CacheAction parse_cache_action(std::string_view label);

struct CacheStatus {
  bool ok = true;
  std::filesystem::path file;
  std::uint64_t checked = 0;     // verify: sampled entries
  std::uint64_t mismatches = 0;  // verify
  std::uint64_t removed = 0;     // purge
  std::string message;
};

// Cache directory: cfg.cache_dir if set, else EXSIEVE_CACHE_DIR. Verify
// recomputes a seeded 1% sample of entries (at least 1000) by trial division.
CacheStatus cache_manage(CacheAction action, const RunConfig& cfg);
std::filesystem::path resolve_cache_dir(const RunConfig& cfg);

}  // namespace exsieve
