#include "exsieve/sieve_weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exsieve/error.hpp"
#include "exsieve/summation.hpp"

namespace exsieve {

ZrSchedule::ZrSchedule(double z, double u) : z_(z), u_(u) {
  if (!(z > 1.0)) throw InvalidArgument("z must exceed 1");
  if (!(u > 2.0)) throw InvalidArgument("u must exceed 2");
}

double ZrSchedule::log_at(int r) const { return std::log(z_) * std::pow((u_ - 2.0) / u_, r); }

double ZrSchedule::operator()(int r) const { return std::exp(log_at(r)); }

int ZrSchedule::first_below_two() const {
  int r = 0;
  const double log2 = std::log(2.0);
  while (!(log_at(r) < log2)) ++r;
  return r;
}

namespace {

constexpr double kGuard = 1e-12;

bool below_with_guard(double lhs, double rhs) { return lhs < rhs - kGuard * std::max(1.0, std::fabs(rhs)); }

}  // namespace

bool beta_sieve_member(std::span<const std::uint64_t> primes_desc, double z, double u) {
  const double rhs = u * std::log(z);
  double prefix = 0.0;
  for (std::size_t i = 0; i < primes_desc.size(); ++i) {
    const double lp = std::log(static_cast<double>(primes_desc[i]));
    prefix += lp;
    const std::size_t h = i + 1;
    if (h % 2 == 1 && !below_with_guard(prefix + 0.5 * u * lp, rhs)) return false;
  }
  return true;
}

int BetaSieveWeight::weight(std::uint64_t d) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), d);
  if (it == support_.end() || *it != d) return 0;
  return weights_[static_cast<std::size_t>(it - support_.begin())];
}

int BetaSieveWeight::convolve_with_one(std::span<const std::uint64_t> small_primes_of_n) const {
  // Subsets of the small prime factors; each subset is a squarefree d | n with d | P(z).
  const std::size_t k = small_primes_of_n.size();
  if (k > 40) throw ResourceError("too many small prime factors");
  int total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::uint64_t d = 1;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) d *= small_primes_of_n[i];
    total += weight(d);
  }
  return total;
}

BetaSieveWeight build_weight(double z, double u, const FactorTable& table, std::size_t max_support) {
  if (!(z > 1.0)) throw InvalidArgument("sifting level z must exceed 1");
  if (!(u > 2.0)) throw InvalidArgument("beta-sieve level u must exceed 2");
  if (z > static_cast<double>(table.limit()))
    throw OutOfRange("z = " + std::to_string(z) + " exceeds table limit " + std::to_string(table.limit()));

  BetaSieveWeight w;
  w.z_ = z;
  w.u_ = u;
  for (std::uint32_t p : table.primes_up_to(z)) w.primes_.push_back(p);

  const double rhs = u * std::log(z);
  const double log_cap = std::log(std::ldexp(1.0, 62));
  std::vector<std::pair<std::uint64_t, std::int8_t>> found;
  found.emplace_back(1, 1);

  // Children of a member append a smaller prime; non-members never have
  // member extensions, so the search prunes on the first failed check.
  struct Frame {
    std::uint64_t d;
    std::size_t next_max;  // primes_[0..next_max) are still available
    double log_prefix;
    int length;
    int mu;
  };
  std::vector<Frame> stack{{1, w.primes_.size(), 0.0, 0, 1}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < f.next_max; ++i) {
      const std::uint64_t p = w.primes_[i];
      const double lp = std::log(static_cast<double>(p));
      const int h = f.length + 1;
      const double prefix = f.log_prefix + lp;
      if (h % 2 == 1 && !below_with_guard(prefix + 0.5 * u * lp, rhs)) continue;
      if (prefix >= log_cap)
        throw ResourceError("beta-sieve support element exceeds 2^62; use a smaller u");
      const std::uint64_t d = f.d * p;
      found.emplace_back(d, static_cast<std::int8_t>(-f.mu));
      if (found.size() > max_support)
        throw ResourceError("beta-sieve support exceeds " + std::to_string(max_support) +
                            " entries at z = " + std::to_string(z) + ", u = " + std::to_string(u) + "; use a smaller u");
      stack.push_back({d, i, prefix, h, -f.mu});
    }
  }
  std::sort(found.begin(), found.end());
  w.support_.reserve(found.size());
  w.weights_.reserve(found.size());
  for (auto& [d, mu] : found) {
    w.support_.push_back(d);
    w.weights_.push_back(mu);
  }
  return w;
}

SieveDefect sieve_indicator_defect(std::uint64_t n, const BetaSieveWeight& w, const ZrSchedule& schedule,
                                   const FactorTable& table) {
  if (n == 0) throw InvalidArgument("n must be positive");
  SieveDefect out;
  const auto fac = table.factorize(n);
  std::vector<std::uint64_t> small;
  double tau = 1.0;
  for (const auto& pp : fac) {
    tau *= pp.exponent + 1;
    if (static_cast<double>(pp.prime) <= w.z()) small.push_back(pp.prime);
  }
  const double least = fac.empty() ? INFINITY : static_cast<double>(fac.front().prime);
  out.indicator = least > w.z() ? 1 : 0;
  out.convolved = w.convolve_with_one(small);
  out.defect = std::fabs(static_cast<double>(out.indicator - out.convolved));

  // r runs over integers >= max(1, u/2). Once z_r < 2 every n passes the
  // indicator, so the remainder is the geometric tail 2^{1 - r}.
  const int r0 = std::max(1, static_cast<int>(std::ceil(schedule.u() / 2.0)));
  const int r_max = std::max(r0, schedule.first_below_two());
  double s = 0.0;
  const double log_least = std::log(least);
  for (int r = r0; r < r_max; ++r)
    if (log_least > schedule.log_at(r)) s += std::ldexp(1.0, -r);
  s += std::ldexp(1.0, 1 - r_max);
  out.bound = tau * tau * s;
  return out;
}

WeightedSumRatio weighted_sum_ratio(const BetaSieveWeight& w, const std::function<double(std::uint64_t)>& nu_prime,
                                    int j, double B) {
  if (j < 0) throw InvalidArgument("j must be non-negative");
  if (!(B >= 1.0)) throw InvalidArgument("B must be at least 1");
  std::vector<double> nu_values;
  CompensatedSum log_rhs;
  bool rhs_zero = false;
  for (std::uint64_t p : w.sifting_primes()) {
    const double v = nu_prime(p);
    if (!(std::fabs(v) < std::min(B, static_cast<double>(p))))
      throw InvalidArgument("nu(" + std::to_string(p) + ") = " + std::to_string(v) + " violates |nu(p)| < min(B, p)");
    nu_values.push_back(v);
    const double factor = 1.0 - v / static_cast<double>(p);
    if (factor == 0.0) rhs_zero = true;
    else log_rhs.add(std::log(factor));
  }
  // rhs factors are positive because |nu(p)| < p.
  WeightedSumRatio out;
  out.rhs = rhs_zero ? 0.0 : std::pow(std::log(w.z()), j) * std::exp(log_rhs.value());

  const auto primes = w.sifting_primes();
  CompensatedSum lhs;
  const auto support = w.support();
  const auto weights = w.weights();
  for (std::size_t i = 0; i < support.size(); ++i) {
    std::uint64_t d = support[i];
    double nu_d = 1.0;
    std::uint64_t rest = d;
    for (std::size_t k = 0; k < primes.size() && rest > 1; ++k)
      if (rest % primes[k] == 0) {
        nu_d *= nu_values[k];
        rest /= primes[k];
      }
    if (nu_d == 0.0) continue;
    const double dd = static_cast<double>(d);
    const double logpow = (j == 0) ? 1.0 : std::pow(std::log(dd), j);
    lhs.add(weights[i] * nu_d * logpow / dd);
  }
  out.lhs = lhs.value();
  out.in_asserted_regime = w.u() >= 50.0 * B;
  return out;
}

}  // namespace exsieve
