#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rsigma/bracket.hpp"
#include "rsigma/density.hpp"
#include "rsigma/primes.hpp"
#include "rsigma/zeta.hpp"

namespace rsigma {

// Record of the prime-by-prime greedy construction of a target x in
// [0, log G_k(r)). Index l of alphas/d/e refers to prime p_{l+1}; c[0] = 0.
struct GreedyTrace {
  int k = 0;
  real r = 0;
  real x = 0;
  std::vector<int> alphas;
  std::vector<real> c;  // partial sums, size steps + 1
  std::vector<real> d;  // deficits against the full local factor
  std::vector<real> e;  // cumulative deficits
  real achieved = 0;
  real residual = 0;
  Bracket log_g;
  Bracket tail_after;        // tail(k, steps, r): residual bound in the dense regime
  FactorSketch witness{1};
};

GreedyTrace greedy_approximate(const PrimeTable& table, int k, real r, real x,
                               std::size_t steps);

struct AnalyticGap {
  std::size_t m = 0;
  GapStatus status = GapStatus::none;
  Bracket left;
  Bracket right;
  // Whether this interval ends below the previous firing one, i.e.
  // log(1 + p_m^-r) <= tail(m - 1); unset for the first entry.
  std::optional<bool> disjoint_from_previous;
};

struct GapScan {
  std::vector<AnalyticGap> entries;  // fired or indeterminate only
  std::optional<std::size_t> first_fired;
  bool has_indeterminate = false;
};

// Every m <= m_max whose T_k(m, r) bracket is positive (or straddles zero)
// with its forbidden log-interval.
GapScan analytic_gap_scan(const PrimeTable& table, int k, real r, std::size_t m_max);

inline constexpr std::uint64_t kMaxCensusBound = 20'000'000;

struct EmpiricalGap {
  real left = 0;
  real right = 0;
  real width = 0;
};

struct CensusAnalyticGap {
  std::size_t m = 0;
  real left = 0;   // exp(tail.hi): certified forbidden region starts here
  real right = 0;  // exp(log(1 + p_m^-r).lo)
  std::size_t values_inside = 0;  // must be zero
  std::optional<std::size_t> empirical_gap;  // index into gaps containing it
};

struct GapCensus {
  int k = 0;
  real r = 0;
  std::uint64_t bound = 0;
  real resolution = 0;
  bool default_resolution = false;
  std::uint64_t members = 0;  // |S_k intersect [1, bound]|
  std::vector<real> values;   // distinct sigma_{-r,k} values, ascending
  std::vector<EmpiricalGap> gaps;
  std::vector<CensusAnalyticGap> analytic_gaps;
  std::size_t estimated_l = 1;
  Bracket sup;  // G_k(r)
};

// Default gap resolution: 10 (G_k(r) - 1) / sqrt(#distinct values).
real default_census_resolution(real sup, std::size_t distinct_values);

// Enumerates n <= bound, keeps n in S_k (trial division by the table), and
// maps the sorted values. resolution <= 0 selects the default.
GapCensus range_census(const PrimeTable& table, int k, real r, std::uint64_t bound,
                       real resolution = 0, std::size_t analytic_m_max = 20);

}  // namespace rsigma
