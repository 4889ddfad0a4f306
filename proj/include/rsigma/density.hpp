#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rsigma/bracket.hpp"
#include "rsigma/primes.hpp"

namespace rsigma {

// Default tolerance for log G evaluations inside criterion functions. Every
// eps parameter below that defaults to 0 means "use evaluation_eps(r)".
inline constexpr real kCriterionEps = 1e-15L;

// Truncation index of the V surrogate.
inline constexpr std::size_t kSurrogateTruncation = 100'000;

// The indices m for which the criterion has to be checked when r <= 2.
inline constexpr std::array<int, 3> kCriticalIndices{1, 2, 4};

// Tolerance used for log G when a caller passes eps = 0.
real evaluation_eps(real r);

// sum_{i=1}^{m} log(sum_{j=0}^{k} p_i^{-jr}) with its rounding bracket.
Bracket log_prefix(const PrimeTable& table, int k, std::size_t m, real r);

// log(1 + p_m^{-r}).
Bracket log_one_plus(const PrimeTable& table, std::size_t m, real r);

// f_k(m, r) = log(1 + p_m^{-r}) + sum_{i<=m} log local factor.
Bracket f_value(const PrimeTable& table, int k, std::size_t m, real r);

// sum_{i>m} log local factor = log G_k(r) - log_prefix. m = 0 gives log G.
Bracket tail(const PrimeTable& table, int k, std::size_t m, real r, real eps = 0);

// T_k(m, r) = f_k(m, r) - log G_k(r).
Bracket t_value(const PrimeTable& table, int k, std::size_t m, real r, real eps = 0);

// Same quantity through log(1 + p_m^{-r}) - tail.
Bracket t_value_via_tail(const PrimeTable& table, int k, std::size_t m, real r,
                         real eps = 0);

// dT_k(m, r)/dr for m in {1,2,4} and r in (1, 7/3). The series is summed over
// every prime in the table; the remaining tail is enclosed in
// [0, B] with B from theta(x) < 1.01624 x (Rosser-Schoenfeld) via partial
// summation:  sum_{p>P} log p p^{-r} <= 1.01624 r P^{1-r}/(r-1) - theta(P) P^{-r},
// scaled by 1/(1-P^{-r})^2 since the summand is at most log p x/(1-x)^2.
Bracket t_derivative(const PrimeTable& table, int k, int m, real r);

// log p_m/(p_m^x + 1) - sum_{i=m+1}^{m+6} log p_i/(p_i^x + 1), x in (1, 7/3].
real j_value(int m, real x);

// V_k(m, r): T with the subtracted sum truncated at the 10^5-th prime.
// Defined for r >= 1 since the sum is finite.
Bracket v_value(const PrimeTable& table, int k, std::size_t m, real r);

// Upper bound on V_k(m, r) - T_k(m, r) = sum_{i>10^5} log local factor,
// from log(1+y) <= y, y <= x/(1-x) and sum_{n>P} n^{-r} <= P^{1-r}/(r-1).
real v_truncation_bound(const PrimeTable& table, real r);

enum class GapStatus { none, interval, indeterminate };

// Forbidden open interval (tail, log(1 + p_m^{-r})) in log scale. The
// certified forbidden part is (left.hi, right.lo).
struct GapInterval {
  GapStatus status = GapStatus::none;
  int k = 0;
  std::size_t m = 0;
  real r = 0;
  Bracket t;
  Bracket left;   // tail(k, m, r)
  Bracket right;  // log(1 + p_m^{-r})
};

GapInterval gap_interval(const PrimeTable& table, int k, std::size_t m, real r,
                         real eps = 0);

struct InequalityCheck {
  std::string name;
  std::string statement;
  real from = 0;
  real to = 0;
  bool includes_right_end = false;
  std::size_t points = 0;
  real min_slack = 0;
  real argmin = 0;
  bool pass = false;
};

struct InequalityReport {
  real grid_step = 0;
  std::vector<InequalityCheck> checks;
  bool pass = false;
};

// Grid verification of the fixed-range inequalities used to order the
// thresholds and to rule out density above 7/3. grid_step must be <= 1e-3.
InequalityReport check_inequalities(real grid_step = 1e-3L);

struct MonotonicityCheck {
  std::string name;
  std::size_t points = 0;
  real min_slack = 0;  // smallest certified increment or margin
  real argmin = 0;
  bool pass = false;
};

struct MonotonicityReport {
  std::vector<MonotonicityCheck> checks;
  bool pass = false;
};

// Grid checks behind the monotonicity of T_k(m, .) on (1, 7/3): J_m increasing
// with J_m(7/3) < 0, certified positive derivative brackets, and certified
// increase of T_k(m, .) itself for the listed k.
MonotonicityReport check_monotonicity(const PrimeTable& table, const std::vector<int>& ks,
                                      real grid_step = 1e-3L);

enum class Verdict { dense, not_dense, undetermined };

std::string to_string(Verdict v);
std::string to_string(GapStatus s);

struct CriterionRow {
  int m = 0;
  Bracket f;
  Bracket log_g;
  Bracket t;
};

struct DensityReport {
  int k = 0;
  real r = 0;
  std::array<CriterionRow, 3> per_m;
  Verdict verdict = Verdict::undetermined;
  real undetermined_width = 0;
  std::string basis;
  std::optional<Bracket> eta_k;  // present when the verdict needed it
};

DensityReport density_report(const PrimeTable& table, int k, real r, real eps = 0);

}  // namespace rsigma
