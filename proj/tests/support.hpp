#pragma once

#include <cstdint>
#include <random>

#include "rsigma/primes.hpp"

namespace rsigma::test {

// One default-size table shared by every case in a binary.
inline const PrimeTable& table() {
  static const PrimeTable t = sieve(kDefaultPrimeLimit);
  return t;
}

// Fixed-seed generator so property runs are reproducible.
inline std::mt19937_64& rng() {
  static std::mt19937_64 g(0x5eed'2024ULL);
  return g;
}

inline long double uniform(long double lo, long double hi) {
  std::uniform_real_distribution<double> d(static_cast<double>(lo), static_cast<double>(hi));
  return d(rng());
}

inline int uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng());
}

}  // namespace rsigma::test
