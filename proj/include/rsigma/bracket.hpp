#pragma once

#include <cfloat>
#include <cmath>
#include <limits>

namespace rsigma {

using real = long double;

inline constexpr real kUnitRoundoff = LDBL_EPSILON / 2;

// Closed interval [lo, hi] known to contain a real value. Arithmetic rounds
// outward by one ulp per endpoint, which is sound for the correctly rounded
// IEEE operations; transcendental wrappers widen by a few ulps more.
struct Bracket {
  real lo = 0;
  real hi = 0;

  static Bracket point(real x) { return {x, x}; }
  static Bracket around(real x, real half_width) {
    return {x - half_width, x + half_width};
  }

  real width() const { return hi - lo; }
  real mid() const { return lo + (hi - lo) / 2; }
  bool contains(real x) const { return lo <= x && x <= hi; }
  bool positive() const { return lo > 0; }
  bool negative() const { return hi < 0; }
  bool nonpositive() const { return hi <= 0; }
  bool straddles_zero() const { return lo <= 0 && hi >= 0; }

  Bracket widened(int ulps) const {
    Bracket b = *this;
    for (int i = 0; i < ulps; ++i) {
      b.lo = std::nextafter(b.lo, -std::numeric_limits<real>::infinity());
      b.hi = std::nextafter(b.hi, std::numeric_limits<real>::infinity());
    }
    return b;
  }
};

inline Bracket operator+(const Bracket& a, const Bracket& b) {
  return Bracket{a.lo + b.lo, a.hi + b.hi}.widened(1);
}

inline Bracket operator-(const Bracket& a, const Bracket& b) {
  return Bracket{a.lo - b.hi, a.hi - b.lo}.widened(1);
}

inline Bracket operator-(const Bracket& a) { return {-a.hi, -a.lo}; }

// Quotient of brackets that are both strictly positive.
inline Bracket divide_positive(const Bracket& a, const Bracket& b) {
  return Bracket{a.lo / b.hi, a.hi / b.lo}.widened(1);
}

inline Bracket multiply_positive(const Bracket& a, const Bracket& b) {
  return Bracket{a.lo * b.lo, a.hi * b.hi}.widened(1);
}

// Natural log of a strictly positive bracket.
inline Bracket log(const Bracket& a) {
  return Bracket{std::log(a.lo), std::log(a.hi)}.widened(2);
}

inline Bracket exp(const Bracket& a) {
  Bracket b = Bracket{std::exp(a.lo), std::exp(a.hi)}.widened(2);
  if (b.lo < 0) b.lo = 0;
  return b;
}

// Tightest bracket containing both.
inline Bracket hull(const Bracket& a, const Bracket& b) {
  return {std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi)};
}

}  // namespace rsigma
