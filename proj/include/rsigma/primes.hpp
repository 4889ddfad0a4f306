#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace rsigma {

inline constexpr std::uint64_t kDefaultPrimeLimit = 2'000'000;

// Search bound for the exhaustive ratio check; larger primes are covered by
// Dusart's prime-gap bound.
inline constexpr std::uint64_t kGapLemmaSearchBound = 396'738;

// Ascending list of all primes <= limit. Immutable after construction.
class PrimeTable {
 public:
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes);

  std::uint64_t limit() const { return limit_; }
  std::size_t size() const { return primes_.size(); }
  std::span<const std::uint32_t> primes() const { return primes_; }

  // p_i with 1-based i; throws std::out_of_range when the table is too short.
  std::uint32_t nth(std::size_t i) const;

  std::uint32_t largest() const { return primes_.back(); }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> primes_;
};

// Segmented sieve of Eratosthenes. Throws std::invalid_argument for limit < 2.
PrimeTable sieve(std::uint64_t limit);

std::uint32_t nth_prime(const PrimeTable& table, std::size_t i);

struct RatioRecord {
  std::size_t index = 0;       // j
  std::uint32_t prime = 0;     // p_j
  std::uint32_t next = 0;      // p_{j+1}
  double ratio = 0;            // p_{j+1} / p_j (informational only)
  bool below_sqrt2 = false;    // exact test p_{j+1}^2 < 2 p_j^2
};

struct GapLemmaReport {
  bool pass = false;
  std::size_t checked = 0;          // number of indices j tested
  RatioRecord worst;                // maximum ratio among checked j
  std::vector<RatioRecord> excluded;  // j in {1, 2, 4}
  std::vector<RatioRecord> failures;  // checked j violating the bound
  double min_slack = 0;             // min over checked j of 2 p_j^2 - p_{j+1}^2, relative to 2 p_j^2
};

// Checks p_{j+1}^2 < 2 p_j^2 in exact integer arithmetic for every j outside
// {1, 2, 4} with p_j < 396738. Throws PreconditionError when the table does
// not extend past the search bound.
GapLemmaReport verify_gap_lemma(const PrimeTable& table);

// On-disk cache. Little-endian binary: 8-byte magic "RSPRIME1", u64 limit,
// u64 count, then count u32 primes.
void save_prime_cache(const PrimeTable& table, const std::filesystem::path& file);

// Returns nullopt if the file is missing or fails the consistency checks
// (magic, limit, count against file size, first entry 2, strictly increasing,
// last entry the largest prime <= limit).
std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file,
                                           std::uint64_t limit);

// Loads limit-keyed cache from dir when present and valid; otherwise sieves
// and (best effort) writes the cache. An empty dir disables caching.
PrimeTable load_or_sieve(std::uint64_t limit, const std::filesystem::path& dir);

}  // namespace rsigma
