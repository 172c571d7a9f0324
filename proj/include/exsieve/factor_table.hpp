#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace exsieve {

// Largest supported table limit. Entries are 32-bit, so this is bounded by
// the entry width; at 4 bytes per entry a 10^8 table needs about 400 MB.
inline constexpr std::uint64_t kMaxTableLimit = 0xFFFFFFFFull - 1;

struct PrimePower {
  std::uint64_t prime;
  int exponent;
};

// Smallest-prime-factor table for 0..limit. spf(0) = spf(1) = 0 (sentinel).
// Immutable after construction.
class FactorTable {
 public:
  // Sieves spf up to `limit`. Throws InvalidArgument for limit < 2 and
  // ResourceError when the allocation fails.
  explicit FactorTable(std::uint64_t limit);

  // Adopts a prebuilt spf array (cache loading). Checks only the shape.
  static FactorTable from_entries(std::vector<std::uint32_t> spf);

  std::uint64_t limit() const { return limit_; }

  std::uint32_t spf(std::uint64_t n) const;
  // P^-(n); returns nullopt for n = 1 (P^-(1) = +infinity).
  std::optional<std::uint64_t> least_prime_factor(std::uint64_t n) const;
  bool is_prime(std::uint64_t n) const;

  std::vector<PrimePower> factorize(std::uint64_t n) const;

  // All primes <= limit in increasing order.
  std::span<const std::uint32_t> primes() const { return primes_; }
  // Primes <= y (y may be real).
  std::span<const std::uint32_t> primes_up_to(double y) const;
  std::uint64_t prime_count(double y) const { return primes_up_to(y).size(); }

  std::span<const std::uint32_t> entries() const { return spf_; }

  friend bool operator==(const FactorTable& a, const FactorTable& b) {
    return a.limit_ == b.limit_ && a.spf_ == b.spf_;
  }

 private:
  FactorTable() = default;
  void collect_primes();

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

FactorTable build_factor_table(std::uint64_t limit);

// ---- persistence -------------------------------------------------------
//
// File layout: magic "XSPF1\0", limit as little-endian u64, then limit+1
// entries as little-endian u32 (0 = sentinel).

std::filesystem::path cache_file_name(const std::filesystem::path& dir,
                                      std::uint64_t limit);
void write_factor_table(const FactorTable& table,
                        const std::filesystem::path& file);
// Throws CacheCorrupt naming the file on bad magic, length or content shape.
FactorTable read_factor_table(const std::filesystem::path& file);

// Directory named by EXSIEVE_CACHE_DIR, if set and non-empty.
std::optional<std::filesystem::path> cache_dir_from_env();

// Loads the table from the cache directory when present, otherwise builds
// it and, if a cache directory is configured, persists it.
FactorTable load_or_build_factor_table(std::uint64_t limit);

}  // namespace exsieve
