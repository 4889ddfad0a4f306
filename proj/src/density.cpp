#include "rsigma/density.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "rsigma/errors.hpp"
#include "rsigma/zeta.hpp"

namespace rsigma {
namespace {

constexpr real kU = LDBL_EPSILON;
constexpr real kSevenThirds = 7.0L / 3.0L;
// 1e-3 with room for the binary rounding of a double-typed argument.
constexpr real kMaxGridStep = 1e-3L * (1 + 1e-12L);

// Neumaier summation that also tracks sum of |terms| for the rounding bound.
struct Accumulator {
  real sum = 0;
  real comp = 0;
  real magnitude = 0;

  void add(real x) {
    const real t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
    magnitude += std::fabs(x);
  }
  real value() const { return sum + comp; }
  // Per-term error of pow/log1p plus the compensated summation error.
  Bracket bracket(real per_term_ulps = 32) const {
    return Bracket::around(value(), (per_term_ulps + 4) * kU * magnitude).widened(1);
  }
};

void require_k(int k) {
  if (k < 1) throw DomainError("k must be >= 1, got " + std::to_string(k));
}

void require_r(real r) {
  if (!(r > 1) || !std::isfinite(r)) {
    throw DomainError("r must be a finite real > 1, got " +
                      std::to_string(static_cast<double>(r)));
  }
}

void require_m(const PrimeTable& table, std::size_t m) {
  if (m > table.size()) {
    throw PreconditionError("index m = " + std::to_string(m) + " needs more than the " +
                            std::to_string(table.size()) + " primes in the table");
  }
}

void require_critical_m(int m) {
  if (std::find(kCriticalIndices.begin(), kCriticalIndices.end(), m) == kCriticalIndices.end()) {
    throw DomainError("m must be one of 1, 2, 4, got " + std::to_string(m));
  }
}

real resolve_eps(real eps, real r) { return eps > 0 ? eps : evaluation_eps(r); }

constexpr std::array<int, 11> kFirstPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};

// Rosser-Schoenfeld: theta(x) < 1.01624 x for x > 0.
constexpr real kChebyshevThetaBound = 1.01624L;

// from + i * step for i = 1, 2, ... below `to` (or up to it when include_right).
// A point within rounding of `to` counts as `to`.
std::vector<real> grid(real from, real to, real step, bool include_right) {
  const real span = (to - from) / step;
  auto count = static_cast<std::size_t>(std::floor(span + 1e-9L));
  const bool lands_on_end = std::fabs(span - static_cast<real>(count)) <= 1e-9L;
  if (lands_on_end && !include_right && count > 0) --count;
  std::vector<real> xs;
  xs.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) xs.push_back(from + static_cast<real>(i) * step);
  if (lands_on_end && include_right && !xs.empty()) xs.back() = to;
  return xs;
}

}  // namespace

real evaluation_eps(real r) {
  // log G is evaluated as a difference of log zeta values, whose absolute
  // width tracks the relative width of zeta; no widening is needed near 1.
  (void)r;
  return kCriterionEps;
}

Bracket log_prefix(const PrimeTable& table, int k, std::size_t m, real r) {
  require_k(k);
  require_r(r);
  require_m(table, m);
  Accumulator acc;
  const auto ps = table.primes();
  for (std::size_t i = 0; i < m; ++i) acc.add(log_local_factor_unchecked(ps[i], k, r));
  return acc.bracket();
}

Bracket log_one_plus(const PrimeTable& table, std::size_t m, real r) {
  require_r(r);
  if (m == 0) throw DomainError("m must be >= 1");
  require_m(table, m);
  const real v = std::log1p(std::pow(static_cast<real>(table.nth(m)), -r));
  return Bracket::around(v, 8 * kU * v).widened(1);
}

Bracket f_value(const PrimeTable& table, int k, std::size_t m, real r) {
  return log_one_plus(table, m, r) + log_prefix(table, k, m, r);
}

Bracket tail(const PrimeTable& table, int k, std::size_t m, real r, real eps) {
  require_k(k);
  require_r(r);
  eps = resolve_eps(eps, r);
  const Bracket prefix = log_prefix(table, k, m, r);
  const Bracket result = log_g_k(k, r, eps / 2) - prefix;
  if (result.width() > eps) {
    throw PrecisionError("tail: bracket width " +
                         std::to_string(static_cast<double>(result.width())) +
                         " exceeds requested tolerance");
  }
  return result;
}

Bracket t_value(const PrimeTable& table, int k, std::size_t m, real r, real eps) {
  require_k(k);
  require_r(r);
  return f_value(table, k, m, r) - log_g_k(k, r, resolve_eps(eps, r));
}

Bracket t_value_via_tail(const PrimeTable& table, int k, std::size_t m, real r, real eps) {
  return log_one_plus(table, m, r) - tail(table, k, m, r, eps);
}

Bracket t_derivative(const PrimeTable& table, int k, int m, real r) {
  require_k(k);
  require_critical_m(m);
  if (!(r > 1 && r < kSevenThirds)) {
    throw DomainError("t_derivative: r must lie in (1, 7/3)");
  }
  const auto ps = table.primes();
  if (ps.size() <= static_cast<std::size_t>(m) + 6) {
    throw PreconditionError("t_derivative: prime table too small");
  }

  Accumulator series;
  Accumulator theta;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const real lp = std::log(static_cast<real>(ps[i]));
    theta.add(lp);
    if (i < static_cast<std::size_t>(m)) continue;
    const real x = std::pow(static_cast<real>(ps[i]), -r);
    // (sum_{a=1}^k a x^a) / (sum_{b=0}^k x^b)
    real num = 0, den = 1, power = 1;
    for (int a = 1; a <= k; ++a) {
      power *= x;
      num += a * power;
      den += power;
      if (power < 1e-40L * den) break;
    }
    series.add(num / den * lp);
  }

  const real big_p = static_cast<real>(ps.back());
  const real p_neg_r = std::pow(big_p, -r);
  const real theta_p = theta.value() * (1 - 1e-15L);
  real tail_bound = kChebyshevThetaBound * r * big_p * p_neg_r / (r - 1) - theta_p * p_neg_r;
  tail_bound /= (1 - p_neg_r) * (1 - p_neg_r);
  tail_bound = std::max<real>(tail_bound, 0) * (1 + 1e-12L);

  const real pm = static_cast<real>(table.nth(static_cast<std::size_t>(m)));
  const real leading = std::log(pm) / (std::pow(pm, r) + 1);
  const Bracket leading_b = Bracket::around(leading, 8 * kU * leading);

  const Bracket partial = series.bracket(64);
  return Bracket{partial.lo - leading_b.hi, partial.hi + tail_bound - leading_b.lo}.widened(2);
}

real j_value(int m, real x) {
  require_critical_m(m);
  if (!(x > 1 && x <= kSevenThirds)) throw DomainError("j_value: x must lie in (1, 7/3]");
  auto term = [x](int p) {
    const real pp = static_cast<real>(p);
    return std::log(pp) / (std::pow(pp, x) + 1);
  };
  real value = term(kFirstPrimes[m - 1]);
  for (int i = m + 1; i <= m + 6; ++i) value -= term(kFirstPrimes[i - 1]);
  return value;
}

Bracket v_value(const PrimeTable& table, int k, std::size_t m, real r) {
  require_k(k);
  if (!(r >= 1) || !std::isfinite(r)) throw DomainError("v_value: r must be >= 1");
  if (table.size() < kSurrogateTruncation) {
    throw PreconditionError("v_value needs the first 100000 primes; raise the prime limit");
  }
  if (m == 0 || m >= kSurrogateTruncation) throw DomainError("v_value: m must lie in [1, 10^5)");
  const auto ps = table.primes();
  Accumulator acc;
  for (std::size_t i = m; i < kSurrogateTruncation; ++i) {
    acc.add(log_local_factor_unchecked(ps[i], k, r));
  }
  const real head = std::log1p(std::pow(static_cast<real>(ps[m - 1]), -r));
  return Bracket::around(head, 8 * kU * head) - acc.bracket();
}

real v_truncation_bound(const PrimeTable& table, real r) {
  require_r(r);
  if (table.size() < kSurrogateTruncation) {
    throw PreconditionError("v_truncation_bound needs the first 100000 primes");
  }
  const real big_p = static_cast<real>(table.nth(kSurrogateTruncation));
  const real p_neg_r = std::pow(big_p, -r);
  return big_p * p_neg_r / ((r - 1) * (1 - p_neg_r)) * (1 + 1e-12L);
}

GapInterval gap_interval(const PrimeTable& table, int k, std::size_t m, real r, real eps) {
  GapInterval gap;
  gap.k = k;
  gap.m = m;
  gap.r = r;
  gap.left = tail(table, k, m, r, eps);
  gap.right = log_one_plus(table, m, r);
  gap.t = gap.right - gap.left;
  if (gap.t.lo > 0) {
    gap.status = GapStatus::interval;
  } else if (gap.t.hi <= 0) {
    gap.status = GapStatus::none;
  } else {
    gap.status = GapStatus::indeterminate;
  }
  return gap;
}

InequalityReport check_inequalities(real grid_step) {
  if (!(grid_step > 0 && grid_step <= kMaxGridStep)) {
    throw DomainError("check_inequalities: grid_step must lie in (0, 1e-3]");
  }
  auto inv = [](real base, real r) { return std::pow(base, -r); };
  // Rounding allowance for the closed-form expressions below.
  constexpr real kAllowance = 1e-16L;

  struct Spec {
    std::string name;
    std::string statement;
    real from, to;
    bool include_right;
    std::function<real(real)> slack;
  };
  const std::vector<Spec> specs{
      {"two-vs-three", "1+2^-r < (1+3^-r)(1+3^-r+3^-2r)", 1.67L, 1.98L, false,
       [&](real r) {
         const real t = inv(3, r);
         return (1 + t) * (1 + t + t * t) - (1 + inv(2, r));
       }},
      {"three-vs-five-seven", "1+3^-r > (5^r/(5^r-1))((7^r+1)/(7^r-1))", 1.67L, 1.98L, false,
       [&](real r) {
         const real f5 = inv(5, r), f7 = inv(7, r);
         return (1 + inv(3, r)) - (1 / (1 - f5)) * ((1 + f7) / (1 - f7));
       }},
      {"r2-vs-r1", "(1+2^-r)(3^r/(3^r+1)) > 1+3^-r", 1.8638L, 2.0L, false,
       [&](real r) {
         const real t = inv(3, r);
         return (1 + inv(2, r)) / (1 + t) - (1 + t);
       }},
      {"r4-vs-r1", "(1+2^-r)(3^r/(3^r+1))(5^r/(5^r+1))(7^r/(7^r+1)) > 1+7^-r", 1.8638L, 2.0L,
       false,
       [&](real r) {
         return (1 + inv(2, r)) / ((1 + inv(3, r)) * (1 + inv(5, r)) * (1 + inv(7, r))) -
                (1 + inv(7, r));
       }},
      {"above-7/3", "(1+2^-r)^2 > zeta(r)", kSevenThirds, 3.0L, true,
       [&](real r) {
         const real h = 1 + inv(2, r);
         return h * h - zeta(r, 1e-15L).hi;
       }},
  };

  InequalityReport report;
  report.grid_step = grid_step;
  report.pass = true;
  for (const auto& spec : specs) {
    InequalityCheck check;
    check.name = spec.name;
    check.statement = spec.statement;
    check.from = spec.from;
    check.to = spec.to;
    check.includes_right_end = spec.include_right;
    check.min_slack = std::numeric_limits<real>::infinity();
    for (const real r : grid(spec.from, spec.to, grid_step, spec.include_right)) {
      const real s = spec.slack(r) - kAllowance;
      ++check.points;
      if (s < check.min_slack) {
        check.min_slack = s;
        check.argmin = r;
      }
    }
    check.pass = check.points > 0 && check.min_slack > 0;
    report.pass = report.pass && check.pass;
    report.checks.push_back(std::move(check));
  }
  return report;
}

MonotonicityReport check_monotonicity(const PrimeTable& table, const std::vector<int>& ks,
                                      real grid_step) {
  if (!(grid_step > 0 && grid_step <= kMaxGridStep)) {
    throw DomainError("check_monotonicity: grid_step must lie in (0, 1e-3]");
  }
  MonotonicityReport report;
  report.pass = true;
  auto finish = [&report](MonotonicityCheck c) {
    c.pass = c.points > 0 && c.min_slack > 0;
    report.pass = report.pass && c.pass;
    report.checks.push_back(std::move(c));
  };
  const auto fine = grid(1, kSevenThirds, grid_step, false);

  for (const int m : kCriticalIndices) {
    MonotonicityCheck inc{"J_" + std::to_string(m) + " increasing on (1,7/3)", 0,
                          std::numeric_limits<real>::infinity(), 0, false};
    for (std::size_t i = 1; i < fine.size(); ++i) {
      const real d = j_value(m, fine[i]) - j_value(m, fine[i - 1]);
      ++inc.points;
      if (d < inc.min_slack) {
        inc.min_slack = d;
        inc.argmin = fine[i];
      }
    }
    finish(inc);

    MonotonicityCheck end{"J_" + std::to_string(m) + "(7/3) < 0", 1, -j_value(m, kSevenThirds),
                          kSevenThirds, false};
    finish(end);
  }

  // Derivative brackets on a coarser grid: each evaluation sums the full table.
  const auto coarse = grid(1, kSevenThirds, 50 * grid_step, false);
  for (const int k : ks) {
    for (const int m : kCriticalIndices) {
      MonotonicityCheck der{"dT_" + std::to_string(k) + "(" + std::to_string(m) + ",r)/dr > 0", 0,
                            std::numeric_limits<real>::infinity(), 0, false};
      for (const real r : coarse) {
        const Bracket d = t_derivative(table, k, m, r);
        ++der.points;
        if (d.lo < der.min_slack) {
          der.min_slack = d.lo;
          der.argmin = r;
        }
      }
      finish(der);

      MonotonicityCheck inc{"T_" + std::to_string(k) + "(" + std::to_string(m) +
                                ",r) increasing on (1,7/3)",
                            0, std::numeric_limits<real>::infinity(), 0, false};
      Bracket prev = t_value(table, k, static_cast<std::size_t>(m), fine.front());
      for (std::size_t i = 1; i < fine.size(); ++i) {
        const Bracket cur = t_value(table, k, static_cast<std::size_t>(m), fine[i]);
        const real d = cur.lo - prev.hi;
        ++inc.points;
        if (d < inc.min_slack) {
          inc.min_slack = d;
          inc.argmin = fine[i];
        }
        prev = cur;
      }
      finish(inc);
    }
  }
  return report;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::dense: return "dense";
    case Verdict::not_dense: return "not_dense";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string to_string(GapStatus s) {
  switch (s) {
    case GapStatus::none: return "none";
    case GapStatus::interval: return "interval";
    case GapStatus::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

}  // namespace rsigma
