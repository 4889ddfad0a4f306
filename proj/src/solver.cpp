#include "rsigma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "rsigma/density.hpp"
#include "rsigma/errors.hpp"
#include "rsigma/zeta.hpp"

namespace rsigma {
namespace {

constexpr real kSevenThirds = 7.0L / 3.0L;

void require_critical_m(int m) {
  if (m != 1 && m != 2 && m != 4) {
    throw DomainError("m must be one of 1, 2, 4, got " + std::to_string(m));
  }
}

void require_eps(real eps) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
}

std::string describe(const Bracket& b) {
  return "[" + std::to_string(static_cast<double>(b.lo)) + ", " +
         std::to_string(static_cast<double>(b.hi)) + "]";
}

}  // namespace

RootResult bisect_increasing(const CertifiedFunction& fn, real lo, real hi, real eps,
                             std::string method) {
  require_eps(eps);
  RootResult out;
  out.method = std::move(method);
  out.residual_lo = fn(lo);
  out.residual_hi = fn(hi);
  if (!out.residual_lo.negative() || !out.residual_hi.positive()) {
    throw PrecisionError("bisection endpoints lack certified opposite signs: f(lo) = " +
                         describe(out.residual_lo) + ", f(hi) = " + describe(out.residual_hi));
  }

  while (hi - lo > eps) {
    const real mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;  // no representable midpoint left
    const Bracket v = fn(mid);
    ++out.iterations;
    if (v.negative()) {
      lo = mid;
      out.residual_lo = v;
    } else if (v.positive()) {
      hi = mid;
      out.residual_hi = v;
    } else {
      // Root sits within the evaluation noise of mid; certify a bracket of
      // half the target width around it instead of guessing.
      const real step = eps / 4;
      const Bracket below = fn(mid - step);
      const Bracket above = fn(mid + step);
      out.iterations += 2;
      if (below.negative() && above.positive()) {
        lo = mid - step;
        hi = mid + step;
        out.residual_lo = below;
        out.residual_hi = above;
        break;
      }
      throw PrecisionError("sign undecidable near r = " +
                           std::to_string(static_cast<double>(mid)) +
                           " at working precision; increase eps");
    }
  }
  if (hi - lo > eps) throw PrecisionError("bisection stalled above requested width");
  out.value = {lo, hi};
  out.residual = fn(out.value.mid());
  return out;
}

real certified_lower_endpoint(const CertifiedFunction& fn) {
  for (real delta = 1e-4L; delta >= 1e-12L; delta /= 10) {
    const real r = 1 + delta;
    try {
      if (fn(r).negative()) return r;
    } catch (const PrecisionError&) {
      // too close to the pole for the requested tolerance; give up below
      break;
    }
  }
  throw PrecisionError("could not certify a negative value near r = 1");
}

RootResult r_threshold(const PrimeTable& table, int k, int m, real eps) {
  if (k < 1) throw DomainError("k must be >= 1");
  require_critical_m(m);
  require_eps(eps);
  const auto idx = static_cast<std::size_t>(m);
  const CertifiedFunction fn = [&table, k, idx](real r) { return t_value(table, k, idx, r); };

  const Bracket at_two = fn(2);
  if (at_two.nonpositive()) {
    RootResult out;
    out.value = Bracket::point(2);
    out.residual = at_two;
    out.residual_hi = at_two;
    out.residual_lo = at_two;
    out.boundary = true;
    out.method = "boundary: T < 0 on (1, 2)";
    return out;
  }
  if (!at_two.positive()) {
    throw PrecisionError("T_k(m, 2) straddles zero; cannot decide between root and boundary");
  }
  return bisect_increasing(fn, certified_lower_endpoint(fn), 2, eps,
                           "bisection on T_k(m, r)");
}

Selection m_selector(const PrimeTable& table, int k, real eps) {
  require_eps(eps);
  for (real e = eps;; e = std::max(e / 100, 1e-13L)) {
    Selection s;
    s.eps_used = e;
    for (std::size_t i = 0; i < kCriticalIndices.size(); ++i) {
      s.thresholds[i] = r_threshold(table, k, kCriticalIndices[i], e);
    }
    // Strict comparison keeps the smallest m among equal midpoints.
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (s.thresholds[i].value.mid() < s.thresholds[best].value.mid()) best = i;
    }
    std::vector<int> tied;
    bool separated = true;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == best) continue;
      const auto& a = s.thresholds[best];
      const auto& b = s.thresholds[i];
      const bool exact_tie = a.boundary && b.boundary;
      if (exact_tie) continue;
      if (b.value.lo <= a.value.hi) {
        separated = false;
        tied.push_back(kCriticalIndices[i]);
      }
    }
    if (separated) {
      s.m = kCriticalIndices[best];
      return s;
    }
    if (e <= 1e-13L) {
      std::string names;
      for (const int m : tied) names += " " + std::to_string(m);
      throw PrecisionError("M_k undecidable at the precision floor; R_k(" +
                           std::to_string(kCriticalIndices[best]) + ") ties with m =" + names);
    }
  }
}

Bracket eta_equation(int k, real r) {
  if (k < 1) throw DomainError("k must be >= 1");
  const real eps = evaluation_eps(r);
  const Bracket log_g = log_g_k(k, r, eps);
  constexpr real kU = LDBL_EPSILON;
  real lhs = 0;
  if (k == 1) {
    lhs = 2 * std::log1p(std::pow(2.0L, -r));
  } else {
    auto power_sum = [k, r](real base) {
      const real x = std::pow(base, -r);
      real sum = 0, term = 1;
      for (int j = 1; j <= k; ++j) sum += (term *= x);
      return std::log1p(sum);
    };
    lhs = power_sum(2) + power_sum(3) + std::log1p(std::pow(3.0L, -r));
  }
  return Bracket::around(lhs, 32 * kU * lhs) - log_g;
}

RootResult eta(int k, real eps) {
  if (k < 1) throw DomainError("k must be >= 1");
  const CertifiedFunction fn = [k](real r) { return eta_equation(k, r); };
  return bisect_increasing(fn, certified_lower_endpoint(fn), 2, eps,
                           "bisection on the defining equation of eta_k");
}

Bracket eta_limit_equation(real r) {
  if (!(r > 1)) throw DomainError("r must be > 1");
  constexpr real kU = LDBL_EPSILON;
  const real x2 = std::pow(2.0L, -r);
  const real x3 = std::pow(3.0L, -r);
  const real lhs = -std::log1p(-x2) + std::log1p(x3) - std::log1p(-x3);
  // Width of log zeta is the relative width of zeta, and zeta(r) > 1/(r-1).
  const real zeta_eps = 0.9L * evaluation_eps(r) * std::max<real>(1, 1 / (r - 1));
  return Bracket::around(lhs, 32 * kU * lhs) - log(zeta(r, zeta_eps));
}

RootResult eta_limit(real eps) {
  const CertifiedFunction fn = eta_limit_equation;
  return bisect_increasing(fn, certified_lower_endpoint(fn), 2, eps,
                           "bisection on (2^r/(2^r-1))((3^r+1)/(3^r-1)) = zeta(r)");
}

RootResult r1_surrogate(const PrimeTable& table, real eps) {
  const CertifiedFunction fn = [&table](real r) { return v_value(table, 1, 1, r); };
  return bisect_increasing(fn, 1, kSevenThirds, eps, "bisection on V_1(1, r)");
}

EtaTable eta_table(const PrimeTable& table, int k_max, real eps) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  std::vector<std::future<EtaRow>> jobs;
  for (int k = 1; k <= k_max; ++k) {
    jobs.push_back(std::async(std::launch::async, [&table, k, eps] {
      EtaRow row;
      row.k = k;
      const Selection sel = m_selector(table, k, eps);
      row.m = sel.m;
      row.thresholds = sel.thresholds;
      row.eta = eta(k, eps);
      const auto& chosen = sel.thresholds[sel.m == 1 ? 0 : sel.m == 2 ? 1 : 2].value;
      row.matches_selected_threshold =
          row.eta.value.lo <= chosen.hi && chosen.lo <= row.eta.value.hi;
      return row;
    }));
  }
  EtaTable out;
  for (auto& job : jobs) out.rows.push_back(job.get());
  out.limit = eta_limit(std::min(eps, kEtaLimitEps));

  out.consistent = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    out.consistent = out.consistent && row.matches_selected_threshold;
    if (row.eta.value.hi < out.limit.value.lo) {
      // certified below
    } else if (row.eta.value.lo > out.limit.value.hi) {
      out.above_limit.push_back(row.k);
    } else {
      out.unresolved_below_limit.push_back(row.k);
    }
    if (i + 1 < out.rows.size()) {
      const auto& next = out.rows[i + 1];
      if (next.eta.value.lo > row.eta.value.hi) {
        // certified increase
      } else if (next.eta.value.hi < row.eta.value.lo) {
        out.decreasing.push_back(row.k);
      } else {
        out.unresolved_increase.push_back(row.k);
      }
    }
  }
  out.consistent = out.consistent && out.decreasing.empty() && out.above_limit.empty();
  return out;
}

}  // namespace rsigma
