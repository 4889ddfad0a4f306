#include <cmath>

#include "rsigma/density.hpp"
#include "rsigma/errors.hpp"
#include "rsigma/solver.hpp"
#include "rsigma/zeta.hpp"

namespace rsigma {

DensityReport density_report(const PrimeTable& table, int k, real r, real eps) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(r > 1) || !std::isfinite(r)) throw DomainError("r must be a finite real > 1");
  if (eps <= 0) eps = evaluation_eps(r);

  DensityReport report;
  report.k = k;
  report.r = r;
  const Bracket log_g = log_g_k(k, r, eps);
  for (std::size_t i = 0; i < kCriticalIndices.size(); ++i) {
    const auto m = static_cast<std::size_t>(kCriticalIndices[i]);
    CriterionRow& row = report.per_m[i];
    row.m = kCriticalIndices[i];
    row.f = f_value(table, k, m, r);
    row.log_g = log_g;
    row.t = row.f - log_g;
  }

  if (r <= 2) {
    report.basis = "r in (1, 2]: T_k(m, r) <= 0 for all m in {1, 2, 4}";
    bool all_nonpositive = true;
    bool any_positive = false;
    real width = 0;
    for (const auto& row : report.per_m) {
      all_nonpositive = all_nonpositive && row.t.nonpositive();
      any_positive = any_positive || row.t.positive();
      if (row.t.straddles_zero() && !row.t.nonpositive()) width = std::max(width, row.t.width());
    }
    if (any_positive) {
      report.verdict = Verdict::not_dense;
    } else if (all_nonpositive) {
      report.verdict = Verdict::dense;
    } else {
      report.verdict = Verdict::undetermined;
      report.undetermined_width = width;
    }
    return report;
  }

  if (r <= 7.0L / 3.0L) {
    if (report.per_m[0].t.positive()) {
      report.verdict = Verdict::not_dense;
      report.basis = "r in (2, 7/3]: T_k(1, r) > 0";
      return report;
    }
    const RootResult threshold = eta(k);
    report.eta_k = threshold.value;
    report.basis = "r in (2, 7/3]: compared against eta_k";
    if (r > threshold.value.hi) {
      report.verdict = Verdict::not_dense;
    } else if (r <= threshold.value.lo) {
      report.verdict = Verdict::dense;
    } else {
      report.verdict = Verdict::undetermined;
      report.undetermined_width = threshold.value.width();
    }
    return report;
  }

  report.verdict = Verdict::not_dense;
  report.basis = "r > 7/3: (1 + 2^-r)^2 > zeta(r) > G_k(r)";
  return report;
}

}  // namespace rsigma
