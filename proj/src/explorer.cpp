#include "rsigma/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "rsigma/errors.hpp"

namespace rsigma {

GreedyTrace greedy_approximate(const PrimeTable& table, int k, real r, real x,
                               std::size_t steps) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(r > 1)) throw DomainError("r must be > 1");
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("target x must be >= 0");
  if (steps == 0) throw DomainError("steps must be >= 1");
  if (steps > table.size()) {
    throw PreconditionError("greedy needs " + std::to_string(steps) + " primes, table has " +
                            std::to_string(table.size()));
  }

  GreedyTrace trace;
  trace.k = k;
  trace.r = r;
  trace.x = x;
  trace.log_g = log_g_k(k, r, evaluation_eps(r));
  if (x >= trace.log_g.hi) throw DomainError("target x must be below log G_k(r)");
  if (x >= trace.log_g.lo) {
    throw IndeterminateError("target x lies within the uncertainty of log G_k(r)");
  }

  trace.alphas.reserve(steps);
  trace.c.reserve(steps + 1);
  trace.d.reserve(steps);
  trace.e.reserve(steps);
  trace.c.push_back(0);

  std::vector<FactorSketch::Factor> witness;
  std::vector<real> partial(static_cast<std::size_t>(k) + 1);
  const auto ps = table.primes();
  real c = 0, e = 0;
  for (std::size_t l = 0; l < steps; ++l) {
    for (int a = 0; a <= k; ++a) partial[a] = log_partial_factor_unchecked(ps[l], a, r);
    int alpha = k;
    while (alpha > 0 && c + partial[alpha] > x) --alpha;
    c += partial[alpha];
    const real d = partial[k] - partial[alpha];
    e += d;
    trace.alphas.push_back(alpha);
    trace.c.push_back(c);
    trace.d.push_back(d);
    trace.e.push_back(e);
    if (alpha > 0) {
      witness.push_back({static_cast<std::uint32_t>(l + 1), static_cast<std::uint32_t>(alpha)});
    }
  }
  trace.achieved = c;
  trace.residual = x - c;
  trace.witness = FactorSketch(k, std::move(witness));
  trace.tail_after = tail(table, k, steps, r);
  return trace;
}

GapScan analytic_gap_scan(const PrimeTable& table, int k, real r, std::size_t m_max) {
  if (m_max < 1) throw DomainError("m_max must be >= 1");
  GapScan scan;
  std::optional<GapInterval> previous;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const GapInterval gap = gap_interval(table, k, m, r);
    if (gap.status == GapStatus::none) {
      previous.reset();
      continue;
    }
    AnalyticGap entry{m, gap.status, gap.left, gap.right, std::nullopt};
    if (gap.status == GapStatus::indeterminate) {
      scan.has_indeterminate = true;
    } else if (!scan.first_fired) {
      scan.first_fired = m;
    }
    if (previous && previous->status == GapStatus::interval &&
        gap.status == GapStatus::interval) {
      if (gap.right.hi <= previous->left.lo) {
        entry.disjoint_from_previous = true;
      } else if (gap.right.lo > previous->left.hi) {
        entry.disjoint_from_previous = false;
      }
    }
    scan.entries.push_back(entry);
    previous = gap;
  }
  return scan;
}

real default_census_resolution(real sup, std::size_t distinct_values) {
  return 10 * (sup - 1) / std::sqrt(static_cast<real>(std::max<std::size_t>(distinct_values, 1)));
}

namespace {

// sigma_{-r,k}(n), or a negative value when n is not in S_k.
real census_value(std::span<const std::uint32_t> primes, int k, real r, std::uint64_t n) {
  real value = 1;
  for (const std::uint64_t p : primes) {
    if (p * p > n) break;
    if (n % p != 0) continue;
    int exponent = 0;
    while (n % p == 0) {
      n /= p;
      ++exponent;
    }
    if (exponent > k) return -1;
    value *= partial_factor_unchecked(p, exponent, r);
  }
  if (n > 1) value *= partial_factor_unchecked(n, 1, r);
  return value;
}

}  // namespace

GapCensus range_census(const PrimeTable& table, int k, real r, std::uint64_t bound,
                       real resolution, std::size_t analytic_m_max) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(r > 1)) throw DomainError("r must be > 1");
  if (bound < 1) throw DomainError("bound must be >= 1");
  if (bound > kMaxCensusBound) {
    throw CapacityError("census bound " + std::to_string(bound) +
                        " exceeds the memory budget; use bound <= " +
                        std::to_string(kMaxCensusBound));
  }
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(bound))) + 1;
  if (table.limit() < root) {
    throw PreconditionError("census trial division needs primes up to sqrt(bound)");
  }

  GapCensus census;
  census.k = k;
  census.r = r;
  census.bound = bound;
  census.sup = g_k(k, r, evaluation_eps(r));

  // Contiguous n-ranges per worker; the sort below makes the merge order-free.
  const unsigned workers =
      std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::vector<real>> chunks(workers);
  {
    std::vector<std::thread> pool;
    const auto primes = table.primes();
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t begin = 1 + bound * w / workers;
        const std::uint64_t end = bound * (w + 1) / workers;
        auto& out = chunks[w];
        for (std::uint64_t n = begin; n <= end; ++n) {
          const real v = census_value(primes, k, r, n);
          if (v > 0) out.push_back(v);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& chunk : chunks) {
    census.members += chunk.size();
    census.values.insert(census.values.end(), chunk.begin(), chunk.end());
    std::vector<real>().swap(chunk);
  }
  std::sort(census.values.begin(), census.values.end());
  census.values.erase(std::unique(census.values.begin(), census.values.end()),
                      census.values.end());

  census.default_resolution = !(resolution > 0);
  census.resolution = census.default_resolution
                          ? default_census_resolution(census.sup.mid(), census.values.size())
                          : resolution;

  for (std::size_t i = 1; i < census.values.size(); ++i) {
    const real w = census.values[i] - census.values[i - 1];
    if (w > census.resolution) census.gaps.push_back({census.values[i - 1], census.values[i], w});
  }
  census.estimated_l = census.gaps.size() + 1;

  const GapScan scan = analytic_gap_scan(table, k, r, analytic_m_max);
  for (const auto& entry : scan.entries) {
    if (entry.status != GapStatus::interval) continue;
    CensusAnalyticGap a;
    a.m = entry.m;
    a.left = std::exp(entry.left.hi);
    a.right = std::exp(entry.right.lo);
    const auto first = std::upper_bound(census.values.begin(), census.values.end(), a.left);
    const auto last = std::lower_bound(census.values.begin(), census.values.end(), a.right);
    a.values_inside = first < last ? static_cast<std::size_t>(last - first) : 0;
    for (std::size_t g = 0; g < census.gaps.size(); ++g) {
      if (census.gaps[g].left <= a.left && a.right <= census.gaps[g].right) {
        a.empirical_gap = g;
        break;
      }
    }
    census.analytic_gaps.push_back(a);
  }
  return census;
}

}  // namespace rsigma
