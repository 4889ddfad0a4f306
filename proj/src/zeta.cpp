#include "rsigma/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rsigma/errors.hpp"

namespace rsigma {
namespace {

constexpr real kU = LDBL_EPSILON;

// B_2, B_4, ..., B_30.
constexpr std::array<real, 15> kBernoulli{
    1.0L / 6,           -1.0L / 30,          1.0L / 42,
    -1.0L / 30,         5.0L / 66,           -691.0L / 2730,
    7.0L / 6,           -3617.0L / 510,      43867.0L / 798,
    -174611.0L / 330,   854513.0L / 138,     -236364091.0L / 2730,
    8553103.0L / 6,     -23749461029.0L / 870, 8615841276005.0L / 14322};

void require_r(real r, const char* what) {
  if (!(r > 1) || !std::isfinite(r)) {
    throw DomainError(std::string(what) + ": r must be a finite real > 1, got " +
                      std::to_string(static_cast<double>(r)));
  }
}

void require_eps(real eps) {
  if (!(eps > 0)) throw DomainError("tolerance must be positive");
}

bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

constexpr int kDirectSumMaxExponent = 64;

// log((1 - x_top) / (1 - x)) with x_top = x^{k+1}.
real log_closed_form(real x, real x_top) { return std::log1p(-x_top) - std::log1p(-x); }

struct EmAttempt {
  real sum = 0;
  real half_width = 0;
  bool converged = false;
};

EmAttempt euler_maclaurin(real s, std::uint64_t n_cut, real target) {
  const real big_n = static_cast<real>(n_cut);
  real partial = 0;
  for (std::uint64_t n = n_cut - 1; n >= 1; --n) {
    partial += std::pow(static_cast<real>(n), -s);
  }
  const real n_pow = std::pow(big_n, -s);
  const real integral = big_n * n_pow / (s - 1);
  const real half = n_pow / 2;

  // Rounding: each small term carries a few ulps and the running sums add
  // one per step; the large integral term and the final sum a handful.
  real small_magnitude = partial + half;
  real corrections = 0;
  // coeff_j = s (s+1) ... (s+2j-2) N^{-s-2j+1} / (2j)!
  real coeff = s * n_pow / big_n / 2;
  real prev_abs = std::numeric_limits<real>::infinity();
  for (std::size_t j = 0; j < kBernoulli.size(); ++j) {
    const real term = kBernoulli[j] * coeff;
    const real abs_term = std::fabs(term);
    if (abs_term > prev_abs) break;  // asymptotic series has turned
    const real tail_bound = 2 * abs_term;
    const real total = partial + integral + half + corrections;
    const real slop = kU * (4 * static_cast<real>(n_cut + j + 4) * small_magnitude +
                            16 * (integral + std::fabs(total)));
    if (tail_bound + slop <= target) {
      return {total, tail_bound + slop, true};
    }
    corrections += term;
    small_magnitude += abs_term;
    prev_abs = abs_term;
    const real two_j = 2 * static_cast<real>(j + 1);
    coeff *= (s + two_j - 1) * (s + two_j) / (big_n * big_n) / ((two_j + 1) * (two_j + 2));
  }
  return {};
}

}  // namespace

Bracket zeta(real r, real eps) {
  require_r(r, "zeta");
  require_eps(eps);
  // Rough magnitude for the floor check: zeta(r) < 1 + 1/(r-1).
  const real approx = 1 + 1 / (r - 1);
  if (eps < kRelativePrecisionFloor * approx) {
    throw PrecisionError("zeta: eps below the extended-precision floor (" +
                         std::to_string(static_cast<double>(kRelativePrecisionFloor * approx)) +
                         ")");
  }
  for (std::uint64_t n_cut = 8; n_cut <= 4096; n_cut *= 2) {
    const EmAttempt a = euler_maclaurin(r, n_cut, eps / 2);
    if (a.converged) return Bracket::around(a.sum, a.half_width).widened(2);
  }
  throw PrecisionError("zeta: could not reach requested tolerance");
}

IntegralZeta zeta_partial_integral(real r, real eps, std::uint64_t max_terms) {
  require_r(r, "zeta_partial_integral");
  require_eps(eps);
  // Tail enclosure width is about N^{-r}; pick N with N^{-r} <= eps / 2.
  const real want = std::ceil(std::pow(eps / 2, -1 / r)) + 1;
  IntegralZeta out;
  out.terms = want > static_cast<real>(max_terms) ? max_terms
                                                  : static_cast<std::uint64_t>(want);
  if (out.terms < 1) out.terms = 1;

  // Compensated summation from the small end.
  real sum = 0, comp = 0;
  for (std::uint64_t n = out.terms; n >= 1; --n) {
    const real y = std::pow(static_cast<real>(n), -r) - comp;
    const real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const real big_n = static_cast<real>(out.terms);
  const real upper_tail = std::pow(big_n, 1 - r) / (r - 1);
  const real lower_tail = std::pow(big_n + 1, 1 - r) / (r - 1);
  const real magnitude = sum + upper_tail;
  const real slop = (16 * kU + 4 * big_n * kU * kU) * magnitude;
  out.value = Bracket{sum + lower_tail - slop, sum + upper_tail + slop}.widened(2);
  out.widened = out.value.width() > eps;
  return out;
}

Bracket g_k(int k, real r, real eps) {
  if (k < 1) throw DomainError("g_k: k must be >= 1");
  require_r(r, "g_k");
  require_eps(eps);
  const Bracket num = zeta(r, eps / 3);
  const Bracket den = zeta((k + 1) * r, eps / (3 * num.hi));
  Bracket g = divide_positive(num, den);
  if (g.width() > eps) {
    throw PrecisionError("g_k: bracket width exceeds requested tolerance");
  }
  return g;
}

Bracket log_g_k(int k, real r, real eps) {
  if (k < 1) throw DomainError("log_g_k: k must be >= 1");
  require_r(r, "log_g_k");
  require_eps(eps);
  // Absolute width of log zeta is the relative width of zeta, and
  // zeta(r) > max(1, 1/(r-1)).
  const real scale = std::max<real>(1, 1 / (r - 1));
  const Bracket result = log(zeta(r, 0.45L * eps * scale)) - log(zeta((k + 1) * r, 0.45L * eps));
  if (result.width() > eps) {
    throw PrecisionError("log_g_k: bracket width exceeds requested tolerance");
  }
  return result;
}

real partial_factor_unchecked(std::uint64_t p, int a, real r) {
  const real x = std::pow(static_cast<real>(p), -r);
  if (a <= kDirectSumMaxExponent) {
    real sum = 1, term = 1;
    for (int j = 1; j <= a; ++j) sum += (term *= x);
    return sum;
  }
  // (1 - x^{a+1}) / (1 - x)
  return std::expm1((a + 1) * std::log(x)) / std::expm1(std::log(x));
}

real log_partial_factor_unchecked(std::uint64_t p, int a, real r) {
  if (a == 0) return 0;
  const real x = std::pow(static_cast<real>(p), -r);
  if (a <= kDirectSumMaxExponent) {
    // Summing from the smallest power keeps the rounding one-sided small.
    real powers[kDirectSumMaxExponent + 1];
    powers[1] = x;
    for (int j = 2; j <= a; ++j) powers[j] = powers[j - 1] * x;
    real sum = 0;
    for (int j = a; j >= 1; --j) sum += powers[j];
    return std::log1p(sum);
  }
  return log_closed_form(x, std::pow(static_cast<real>(p), -(a + 1) * r));
}

real local_factor(std::uint64_t p, int k, real r) {
  require_r(r, "local_factor");
  if (k < 1) throw DomainError("local_factor: k must be >= 1");
  if (!is_prime_small(p)) throw DomainError("local_factor: p must be prime");
  const real x = std::pow(static_cast<real>(p), -r);
  const real lx = std::log(x);
  return std::expm1((k + 1) * lx) / std::expm1(lx);
}

real log_local_factor(std::uint64_t p, int k, real r) {
  require_r(r, "log_local_factor");
  if (k < 1) throw DomainError("log_local_factor: k must be >= 1");
  if (!is_prime_small(p)) throw DomainError("log_local_factor: p must be prime");
  return log_local_factor_unchecked(p, k, r);
}

real log_local_factor_unchecked(std::uint64_t p, int k, real r) {
  return log_closed_form(std::pow(static_cast<real>(p), -r),
                         std::pow(static_cast<real>(p), -(k + 1) * r));
}

FactorSketch::FactorSketch(int k, std::vector<Factor> factors)
    : k_(k), factors_(std::move(factors)) {
  if (k_ < 1) throw DomainError("FactorSketch: k must be >= 1");
  std::uint32_t prev = 0;
  for (const auto& f : factors_) {
    if (f.prime_index == 0 || f.prime_index <= prev) {
      throw DomainError("FactorSketch: prime indices must be 1-based and strictly increasing");
    }
    if (f.exponent < 1 || f.exponent > static_cast<std::uint32_t>(k_)) {
      throw DomainError("FactorSketch: exponent " + std::to_string(f.exponent) +
                        " outside [1, k]; n is not in S_k");
    }
    prev = f.prime_index;
  }
}

real sigma_restricted(const PrimeTable& table, const FactorSketch& n, real r) {
  require_r(r, "sigma_restricted");
  real value = 1;
  for (const auto& f : n.factors()) {
    value *= partial_factor_unchecked(table.nth(f.prime_index),
                                      static_cast<int>(f.exponent), r);
  }
  return value;
}

real log_sigma_restricted(const PrimeTable& table, const FactorSketch& n, real r) {
  require_r(r, "log_sigma_restricted");
  real value = 0;
  for (const auto& f : n.factors()) {
    value += log_partial_factor_unchecked(table.nth(f.prime_index),
                                          static_cast<int>(f.exponent), r);
  }
  return value;
}

}  // namespace rsigma
