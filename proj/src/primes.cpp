#include "rsigma/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include "rsigma/errors.hpp"

namespace rsigma {

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
    : limit_(limit), primes_(std::move(primes)) {
  if (primes_.empty() || primes_.front() != 2) {
    throw std::invalid_argument("prime table must start at 2");
  }
}

std::uint32_t PrimeTable::nth(std::size_t i) const {
  if (i == 0 || i > primes_.size()) {
    throw std::out_of_range("prime index " + std::to_string(i) +
                            " outside table of " +
                            std::to_string(primes_.size()) + " primes");
  }
  return primes_[i - 1];
}

PrimeTable sieve(std::uint64_t limit) {
  if (limit < 2) throw std::invalid_argument("sieve limit must be >= 2");
  if (limit > 0xFFFFFFFFull) {
    throw std::invalid_argument("sieve limit must fit in 32 bits");
  }

  // Base primes up to sqrt(limit) with a plain sieve.
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<bool> small(root + 1, true);
  std::vector<std::uint32_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = false;
  }

  constexpr std::uint64_t kSegment = 1 << 16;
  std::vector<std::uint32_t> primes;
  std::vector<char> seg(kSegment);
  for (std::uint64_t low = 2; low <= limit; low += kSegment) {
    const std::uint64_t high = std::min(low + kSegment - 1, limit);
    std::fill(seg.begin(), seg.end(), 1);
    for (const std::uint64_t p : base) {
      if (p * p > high) break;
      std::uint64_t start = std::max(p * p, (low + p - 1) / p * p);
      for (std::uint64_t j = start; j <= high; j += p) seg[j - low] = 0;
    }
    for (std::uint64_t n = low; n <= high; ++n) {
      if (seg[n - low]) primes.push_back(static_cast<std::uint32_t>(n));
    }
  }
  return PrimeTable(limit, std::move(primes));
}

std::uint32_t nth_prime(const PrimeTable& table, std::size_t i) {
  return table.nth(i);
}

GapLemmaReport verify_gap_lemma(const PrimeTable& table) {
  const auto ps = table.primes();
  if (table.limit() < kGapLemmaSearchBound || ps.back() <= kGapLemmaSearchBound) {
    throw PreconditionError(
        "gap lemma verification needs a prime table extending past 396738");
  }

  GapLemmaReport report;
  report.min_slack = 1.0;
  for (std::size_t idx = 0; ps[idx] < kGapLemmaSearchBound; ++idx) {
    const std::size_t j = idx + 1;
    const std::uint64_t p = ps[idx];
    const std::uint64_t q = ps[idx + 1];
    RatioRecord rec{j, static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(q),
                    static_cast<double>(q) / static_cast<double>(p),
                    q * q < 2 * p * p};
    if (j == 1 || j == 2 || j == 4) {
      report.excluded.push_back(rec);
      continue;
    }
    ++report.checked;
    if (report.checked == 1 || rec.ratio > report.worst.ratio) report.worst = rec;
    const double slack = static_cast<double>(2 * p * p - std::min(2 * p * p, q * q)) /
                         static_cast<double>(2 * p * p);
    report.min_slack = std::min(report.min_slack, rec.below_sqrt2 ? slack : -1.0);
    if (!rec.below_sqrt2) report.failures.push_back(rec);
  }
  report.pass = report.failures.empty();
  return report;
}

namespace {

constexpr std::array<char, 8> kMagic{'R', 'S', 'P', 'R', 'I', 'M', 'E', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), b.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), b.size());
}

template <typename T>
bool get_le(std::istream& in, T& v) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) return false;
  v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return true;
}

bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::filesystem::path cache_file(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("primes-" + std::to_string(limit) + ".bin");
}

}  // namespace

void save_prime_cache(const PrimeTable& table, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write prime cache " + file.string());
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, table.limit());
  put_u64(out, table.size());
  for (const auto p : table.primes()) put_u32(out, p);
  if (!out) throw std::runtime_error("short write to prime cache " + file.string());
}

std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file,
                                           std::uint64_t limit) {
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(file, ec);
  if (ec) return std::nullopt;
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;

  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  std::uint64_t stored_limit = 0, count = 0;
  if (!get_le(in, stored_limit) || !get_le(in, count)) return std::nullopt;
  if (stored_limit != limit || count == 0 || bytes != 24 + 4 * count) return std::nullopt;

  std::vector<std::uint32_t> primes(count);
  for (auto& p : primes) {
    if (!get_le(in, p)) return std::nullopt;
  }
  if (primes.front() != 2 || primes.back() > limit) return std::nullopt;
  if (std::adjacent_find(primes.begin(), primes.end(), std::greater_equal<>()) !=
      primes.end()) {
    return std::nullopt;
  }
  // The last entry must be the largest prime <= limit.
  if (!is_prime_trial(primes.back())) return std::nullopt;
  for (std::uint64_t n = std::uint64_t{primes.back()} + 1; n <= limit; ++n) {
    if (is_prime_trial(n)) return std::nullopt;
  }
  return PrimeTable(limit, std::move(primes));
}

PrimeTable load_or_sieve(std::uint64_t limit, const std::filesystem::path& dir) {
  if (dir.empty()) return sieve(limit);
  const auto file = cache_file(dir, limit);
  if (auto cached = load_prime_cache(file, limit)) return std::move(*cached);
  PrimeTable table = sieve(limit);
  try {
    std::filesystem::create_directories(dir);
    save_prime_cache(table, file);
  } catch (const std::exception&) {
    // cache is optional
  }
  return table;
}

}  // namespace rsigma
