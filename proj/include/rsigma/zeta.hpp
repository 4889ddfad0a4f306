#pragma once

#include <cstdint>
#include <vector>

#include "rsigma/bracket.hpp"
#include "rsigma/primes.hpp"

namespace rsigma {

// Smallest bracket width, relative to the value, that extended precision can
// certify. Requests below it raise PrecisionError.
inline constexpr real kRelativePrecisionFloor = 64 * LDBL_EPSILON;

// Riemann zeta at real r > 1 by Euler-Maclaurin summation. The remainder
// after the last Bernoulli correction is bounded by the first omitted term
// (valid for x^-r, whose derivatives alternate in sign), and accumulated
// rounding is added to the half-width. Width of the result is <= eps.
Bracket zeta(real r, real eps);

struct IntegralZeta {
  Bracket value;
  std::uint64_t terms = 0;
  bool widened = false;  // term cap hit; width exceeds the requested eps
};

// Certified baseline: sum_{n<=N} n^-r plus the integral enclosure
// [(N+1)^{1-r}, N^{1-r}] / (r-1) of the tail. Near r = 1 the term count is
// capped at max_terms and the bracket is returned wider than eps.
IntegralZeta zeta_partial_integral(real r, real eps,
                                   std::uint64_t max_terms = 20'000'000);

// G_k(r) = zeta(r) / zeta((k+1) r), the supremum of sigma_{-r,k}.
Bracket g_k(int k, real r, real eps);
Bracket log_g_k(int k, real r, real eps);

// sum_{j=0}^{k} p^{-jr} in closed form.
real local_factor(std::uint64_t p, int k, real r);
real log_local_factor(std::uint64_t p, int k, real r);

// Closed-form log local factor without domain checks; used by the density
// sums, which run over every prime in the table.
real log_local_factor_unchecked(std::uint64_t p, int k, real r);

// sum_{j=0}^{a} p^{-jr} for 0 <= a by direct summation, without the domain checks of the public
// local_factor. Hot loops use these directly.
real partial_factor_unchecked(std::uint64_t p, int a, real r);
real log_partial_factor_unchecked(std::uint64_t p, int a, real r);

// An element of S_k kept in factored form: strictly increasing 1-based prime
// indices with exponents in [1, k]. The integer itself is never formed.
class FactorSketch {
 public:
  struct Factor {
    std::uint32_t prime_index;
    std::uint32_t exponent;
    bool operator==(const Factor&) const = default;
  };

  explicit FactorSketch(int k, std::vector<Factor> factors = {});

  int k() const { return k_; }
  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

 private:
  int k_;
  std::vector<Factor> factors_;
};

real sigma_restricted(const PrimeTable& table, const FactorSketch& n, real r);
real log_sigma_restricted(const PrimeTable& table, const FactorSketch& n, real r);

}  // namespace rsigma
