#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rsigma/bracket.hpp"
#include "rsigma/primes.hpp"

namespace rsigma {

inline constexpr real kThresholdEps = 1e-10L;
inline constexpr real kEtaLimitEps = 1e-9L;

// A certified root of an increasing function: the function's bracket is
// strictly negative at value.lo and strictly positive at value.hi. The one
// exception is `boundary`, the R_k(m) = 2 branch where the function is
// negative on all of (1, 2) and value = [2, 2].
struct RootResult {
  Bracket value;
  int iterations = 0;
  Bracket residual;     // function at value.mid()
  Bracket residual_lo;  // function at value.lo
  Bracket residual_hi;  // function at value.hi
  bool boundary = false;
  std::string method;
};

using CertifiedFunction = std::function<Bracket(real)>;

// Bisection of an increasing function on [lo, hi] until the bracket is at
// most eps wide. Signs at both ends must already be certified.
RootResult bisect_increasing(const CertifiedFunction& fn, real lo, real hi, real eps,
                             std::string method);

// Largest r = 1 + 10^-j (j >= 4) with fn(r) certified negative.
real certified_lower_endpoint(const CertifiedFunction& fn);

// R_k(m) for m in {1, 2, 4}.
RootResult r_threshold(const PrimeTable& table, int k, int m, real eps = kThresholdEps);

struct Selection {
  int m = 0;
  std::array<RootResult, 3> thresholds;  // R_k(1), R_k(2), R_k(4)
  real eps_used = 0;
};

// M_k: the smallest m in {1, 2, 4} attaining min R_k(m). Tightens eps down to
// 1e-13 when brackets overlap, then raises PrecisionError naming the ties.
Selection m_selector(const PrimeTable& table, int k, real eps = kThresholdEps);

// Residual of the equation defining eta_k, in log form:
//   k = 1:  2 log(1 + 2^-r) - log G_1(r)
//   k > 1:  log(sum_j 2^-jr) + log(sum_j 3^-jr) + log(1 + 3^-r) - log G_k(r)
Bracket eta_equation(int k, real r);

RootResult eta(int k, real eps = kThresholdEps);

// log(2^r/(2^r-1)) + log((3^r+1)/(3^r-1)) - log zeta(r); its root is the
// k -> infinity limit of the thresholds.
Bracket eta_limit_equation(real r);

RootResult eta_limit(real eps = kEtaLimitEps);

// Root of V_1(1, .) on [1, 7/3].
RootResult r1_surrogate(const PrimeTable& table, real eps = kThresholdEps);

struct EtaRow {
  int k = 0;
  int m = 0;
  std::array<RootResult, 3> thresholds;
  RootResult eta;
  bool matches_selected_threshold = false;  // eta_k and R_k(M_k) brackets overlap
};

struct EtaTable {
  std::vector<EtaRow> rows;
  RootResult limit;
  // Adjacent rows whose eta brackets overlap, so strict increase is not
  // certified at this precision (expected once eta_{k+1} - eta_k < eps).
  std::vector<int> unresolved_increase;
  std::vector<int> decreasing;          // certified violations
  std::vector<int> unresolved_below_limit;
  std::vector<int> above_limit;         // certified violations
  bool consistent = false;              // no certified violation anywhere
};

// Rows are solved concurrently and merged in k order.
EtaTable eta_table(const PrimeTable& table, int k_max, real eps = kThresholdEps);

}  // namespace rsigma
