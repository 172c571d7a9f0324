#include "exsieve/factor_table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "exsieve/error.hpp"

namespace exsieve {

namespace {

constexpr std::array<char, 6> kMagic = {'X', 'S', 'P', 'F', '1', '\0'};

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, bytes);
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

FactorTable::FactorTable(std::uint64_t limit) : limit_(limit) {
  if (limit < 2) throw InvalidArgument("factor table limit must be >= 2, got " + std::to_string(limit));
  if (limit > kMaxTableLimit)
    throw ResourceError("factor table limit " + std::to_string(limit) + " exceeds supported maximum " +
                        std::to_string(kMaxTableLimit));
  try {
    spf_.assign(limit + 1, 0);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate factor table of " + std::to_string(limit + 1) + " entries (" +
                        std::to_string((limit + 1) * sizeof(std::uint32_t)) + " bytes)");
  }
  for (std::uint64_t p = 2; p * p <= limit; ++p) {
    if (spf_[p] != 0) continue;
    for (std::uint64_t m = p * p; m <= limit; m += p)
      if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(p);
  }
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (spf_[n] == 0) spf_[n] = static_cast<std::uint32_t>(n);
  collect_primes();
}

FactorTable FactorTable::from_entries(std::vector<std::uint32_t> spf) {
  if (spf.size() < 3) throw InvalidArgument("factor table needs at least 3 entries");
  FactorTable t;
  t.limit_ = spf.size() - 1;
  t.spf_ = std::move(spf);
  t.collect_primes();
  return t;
}

void FactorTable::collect_primes() {
  primes_.clear();
  for (std::uint64_t n = 2; n <= limit_; ++n)
    if (spf_[n] == n) primes_.push_back(static_cast<std::uint32_t>(n));
}

std::uint32_t FactorTable::spf(std::uint64_t n) const {
  if (n > limit_) throw OutOfRange("n = " + std::to_string(n) + " exceeds table limit " + std::to_string(limit_));
  return spf_[n];
}

std::optional<std::uint64_t> FactorTable::least_prime_factor(std::uint64_t n) const {
  if (n <= 1) return std::nullopt;
  return spf(n);
}

bool FactorTable::is_prime(std::uint64_t n) const { return n >= 2 && spf(n) == n; }

std::vector<PrimePower> FactorTable::factorize(std::uint64_t n) const {
  if (n > limit_) throw OutOfRange("n = " + std::to_string(n) + " exceeds table limit " + std::to_string(limit_));
  std::vector<PrimePower> out;
  while (n > 1) {
    const std::uint64_t p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  return out;
}

std::span<const std::uint32_t> FactorTable::primes_up_to(double y) const {
  if (!(y >= 2.0)) return {};
  const double fy = std::floor(y);
  const auto cap = static_cast<std::uint64_t>(std::min<double>(fy, static_cast<double>(limit_)));
  auto it = std::upper_bound(primes_.begin(), primes_.end(), cap);
  return {primes_.data(), static_cast<std::size_t>(it - primes_.begin())};
}

FactorTable build_factor_table(std::uint64_t limit) { return FactorTable(limit); }

std::filesystem::path cache_file_name(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("spf_" + std::to_string(limit) + ".bin");
}

void write_factor_table(const FactorTable& table, const std::filesystem::path& file) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ResourceError("cannot open cache file for writing: " + tmp);
    os.write(kMagic.data(), kMagic.size());
    put_le(os, table.limit(), 8);
    std::vector<char> buf;
    buf.reserve(4 * 65536);
    for (std::uint32_t e : table.entries()) {
      for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((e >> (8 * i)) & 0xFF));
      if (buf.size() >= 4 * 65536) {
        os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw ResourceError("short write on cache file: " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

FactorTable read_factor_table(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw CacheCorrupt("cannot open cache file: " + file.string());
  std::array<char, 6> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw CacheCorrupt("bad magic in cache file: " + file.string());
  unsigned char lim[8];
  is.read(reinterpret_cast<char*>(lim), 8);
  if (!is) throw CacheCorrupt("truncated header in cache file: " + file.string());
  const std::uint64_t limit = get_le(lim, 8);
  std::error_code ec;
  const auto size = std::filesystem::file_size(file, ec);
  if (ec || limit < 2 || limit > kMaxTableLimit || size != 14 + 4 * (limit + 1))
    throw CacheCorrupt("length mismatch in cache file: " + file.string());

  std::vector<std::uint32_t> spf(limit + 1);
  std::vector<unsigned char> buf(4 * 65536);
  std::uint64_t idx = 0;
  while (idx <= limit) {
    const std::uint64_t chunk = std::min<std::uint64_t>(65536, limit + 1 - idx);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(4 * chunk));
    if (!is) throw CacheCorrupt("truncated body in cache file: " + file.string());
    for (std::uint64_t i = 0; i < chunk; ++i) spf[idx + i] = static_cast<std::uint32_t>(get_le(&buf[4 * i], 4));
    idx += chunk;
  }
  // Shape checks: sentinels, and each entry must be a nontrivial divisor.
  if (spf[0] != 0 || spf[1] != 0) throw CacheCorrupt("bad sentinel entries in cache file: " + file.string());
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = spf[n];
    if (p < 2 || n % p != 0) throw CacheCorrupt("entry " + std::to_string(n) + " is not a divisor in cache file: " + file.string());
  }
  return FactorTable::from_entries(std::move(spf));
}

std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("EXSIEVE_CACHE_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

FactorTable load_or_build_factor_table(std::uint64_t limit) {
  const auto dir = cache_dir_from_env();
  if (!dir) return FactorTable(limit);
  const auto file = cache_file_name(*dir, limit);
  if (std::filesystem::exists(file)) return read_factor_table(file);
  FactorTable t(limit);
  std::filesystem::create_directories(*dir);
  write_factor_table(t, file);
  return t;
}

}  // namespace exsieve
