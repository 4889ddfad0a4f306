#include <mpfr.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rsigma/errors.hpp"
#include "rsigma/zeta.hpp"
#include "support.hpp"

using namespace rsigma;

namespace {

// 256-bit reference value of zeta(r) for a long double r.
class MpZeta {
 public:
  explicit MpZeta(long double r) {
    mpfr_inits2(256, x_, z_, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ld(x_, r, MPFR_RNDN);
    mpfr_zeta(z_, x_, MPFR_RNDN);
  }
  ~MpZeta() { mpfr_clears(x_, z_, static_cast<mpfr_ptr>(nullptr)); }
  MpZeta(const MpZeta&) = delete;
  MpZeta& operator=(const MpZeta&) = delete;

  bool inside(const Bracket& b) const {
    return mpfr_cmp_ld(z_, b.lo) >= 0 && mpfr_cmp_ld(z_, b.hi) <= 0;
  }
  long double approx() const { return mpfr_get_ld(z_, MPFR_RNDN); }

 private:
  mpfr_t x_, z_;
};

const long double kPi = std::numbers::pi_v<long double>;

}  // namespace

TEST_CASE("zeta at even integers") {
  const Bracket z2 = zeta(2, 1e-12L);
  CHECK(z2.width() <= 1e-12L);
  CHECK(z2.contains(kPi * kPi / 6));
  CHECK(MpZeta(2).inside(z2));
  const Bracket z4 = zeta(4, 1e-12L);
  CHECK(z4.contains(kPi * kPi * kPi * kPi / 90));
  CHECK(MpZeta(4).inside(z4));
}

TEST_CASE("zeta domain and precision errors") {
  CHECK_THROWS_AS(zeta(1, 1e-10L), DomainError);
  CHECK_THROWS_AS(zeta(0.5L, 1e-10L), DomainError);
  CHECK_THROWS_AS(zeta(2, 0), DomainError);
  CHECK_THROWS_AS(zeta(2, 1e-25L), PrecisionError);
  CHECK_THROWS_AS(zeta(1.001L, 1e-17L), PrecisionError);
}

TEST_CASE("zeta near the limit constant") {
  const long double r = 1.8877909L;
  const Bracket z = zeta(r, 1e-10L);
  CHECK(z.width() <= 1e-10L);
  CHECK(MpZeta(r).inside(z));
  const long double lhs =
      std::pow(2.0L, r) / (std::pow(2.0L, r) - 1) * (std::pow(3.0L, r) + 1) /
      (std::pow(3.0L, r) - 1);
  CHECK(std::fabs(lhs - z.mid()) < 1e-6L);
}

TEST_CASE("property: zeta brackets contain a 256-bit reference") {
  for (int i = 0; i < 300; ++i) {
    const long double r = i % 3 == 0 ? test::uniform(1.0005L, 1.1L) : test::uniform(1.1L, 12);
    const long double scale = 1 + 1 / (r - 1);
    const long double eps = scale * std::pow(10.0L, -test::uniform(4, 16.5L));
    const Bracket z = zeta(r, eps);
    CAPTURE(r);
    CAPTURE(eps);
    CHECK(z.width() <= eps);
    CHECK(MpZeta(r).inside(z));
  }
}

TEST_CASE("integral baseline agrees with Euler-Maclaurin") {
  for (const long double r : {1.5L, 2.0L, 3.0L, 7.25L}) {
    const IntegralZeta base = zeta_partial_integral(r, 1e-7L);
    CHECK_FALSE(base.widened);
    CHECK(base.value.width() <= 1e-7L);
    CHECK(MpZeta(r).inside(base.value));
    const Bracket em = zeta(r, 1e-14L);
    CHECK(em.lo <= base.value.hi);
    CHECK(base.value.lo <= em.hi);
  }
}

TEST_CASE("integral baseline caps its work near r = 1") {
  const IntegralZeta near = zeta_partial_integral(1.001L, 1e-10L, 100000);
  CHECK(near.terms == 100000);
  CHECK(near.widened);
  CHECK(near.value.width() > 1e-10L);
  CHECK(MpZeta(1.001L).inside(near.value));
}

TEST_CASE("G_k") {
  const Bracket g = g_k(1, 2, 1e-10L);
  CHECK(g.width() <= 1e-10L);
  CHECK(g.contains(15 / (kPi * kPi)));
  const Bracket g40 = g_k(40, 2, 1e-12L);
  CHECK(std::fabs(g40.mid() - kPi * kPi / 6) < 1e-10L);
  const Bracket near = g_k(1, 1.01L, 1e-8L);
  CHECK(std::isfinite(near.hi));
  CHECK(near.lo > 1);
  CHECK_THROWS_AS(g_k(0, 2, 1e-10L), DomainError);
  CHECK_THROWS_AS(g_k(1, 1, 1e-10L), DomainError);
}

TEST_CASE("property: 1 < G_k(r) < zeta(r) and log G agrees") {
  for (int i = 0; i < 100; ++i) {
    const int k = test::uniform_int(1, 12);
    const long double r = test::uniform(1.01L, 4);
    const Bracket g = g_k(k, r, 1e-11L);
    const Bracket z = zeta(r, 1e-11L);
    CHECK(g.lo > 1);
    CHECK(g.lo < z.hi);
    // zeta(r) - G_k(r) ~ 2^{-(k+1)r}; only resolvable when well above eps.
    if (std::pow(2.0L, -(k + 1) * r) > 1e-9L) CHECK(g.hi < z.lo);
    const Bracket lg = log_g_k(k, r, 1e-14L);
    CHECK(lg.width() <= 1e-14L);
    CHECK(lg.lo <= std::log(g.hi));
    CHECK(std::log(g.lo) <= lg.hi);
  }
}

TEST_CASE("local factors") {
  CHECK(local_factor(2, 1, 2) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(local_factor(2, 3, 2) == doctest::Approx(1.328125).epsilon(1e-15));
  CHECK_THROWS_AS(local_factor(3, 2, 1), DomainError);
  CHECK_THROWS_AS(local_factor(4, 2, 2), DomainError);
  CHECK_THROWS_AS(local_factor(2, 0, 2), DomainError);
  CHECK(std::fabs(log_local_factor(5, 2, 1.7L) - std::log(local_factor(5, 2, 1.7L))) < 1e-17L);
  for (int i = 0; i < 200; ++i) {
    const int k = test::uniform_int(1, 80);
    const long double r = test::uniform(1.001L, 5);
    const std::uint64_t p = test::table().nth(static_cast<std::size_t>(test::uniform_int(1, 500)));
    const long double x = std::pow(static_cast<long double>(p), -r);
    const long double v = local_factor(p, k, r);
    CHECK(v > 1);
    CHECK(v < 1 / (1 - x) * (1 + 1e-17L));
    CHECK(std::fabs(partial_factor_unchecked(p, k, r) - v) < 1e-17L * v);
    CHECK(std::fabs(log_partial_factor_unchecked(p, k, r) - log_local_factor(p, k, r)) <
          1e-17L);
  }
}

TEST_CASE("restricted sigma on factor sketches") {
  const auto& t = test::table();
  CHECK(sigma_restricted(t, FactorSketch(1), 2) == 1);
  CHECK(log_sigma_restricted(t, FactorSketch(1), 2) == 0);
  CHECK(sigma_restricted(t, FactorSketch(1, {{1, 1}}), 2) == doctest::Approx(1.25));
  CHECK(sigma_restricted(t, FactorSketch(1, {{1, 1}, {2, 1}}), 2) ==
        doctest::Approx(1.25L * (1 + 1.0L / 9)).epsilon(1e-15));
  CHECK_THROWS_AS(FactorSketch(1, {{1, 2}}), DomainError);
  CHECK_THROWS_AS(FactorSketch(2, {{2, 1}, {1, 1}}), DomainError);
  CHECK_THROWS_AS(FactorSketch(2, {{0, 1}}), DomainError);
  CHECK_THROWS_AS(FactorSketch(2, {{3, 0}}), DomainError);
  CHECK_THROWS_AS(FactorSketch(0), DomainError);
  CHECK_THROWS_AS(sigma_restricted(t, FactorSketch(1), 1), DomainError);
}

TEST_CASE("property: sketches are multiplicative and bounded by G_k") {
  const auto& t = test::table();
  for (int trial = 0; trial < 200; ++trial) {
    const int k = test::uniform_int(1, 6);
    const long double r = test::uniform(1.05L, 3);
    std::vector<FactorSketch::Factor> fs;
    std::uint32_t idx = 0;
    const int len = test::uniform_int(0, 30);
    for (int i = 0; i < len; ++i) {
      idx += static_cast<std::uint32_t>(test::uniform_int(1, 40));
      fs.push_back({idx, static_cast<std::uint32_t>(test::uniform_int(1, k))});
    }
    const FactorSketch n(k, fs);
    const long double s = sigma_restricted(t, n, r);
    long double product = 1;
    for (const auto& f : fs) product *= sigma_restricted(t, FactorSketch(k, {f}), r);
    CHECK(std::fabs(s - product) <= 1e-16L * s);
    CHECK(std::fabs(std::log(s) - log_sigma_restricted(t, n, r)) < 1e-16L);
    CHECK(s >= 1);
    CHECK(s < g_k(k, r, 1e-10L).hi);
  }
}

TEST_CASE("Euler product over the table approaches log G within the dropped tail") {
  const auto& t = test::table();
  for (const int k : {1, 3}) {
    for (const long double r : {1.3L, 1.9L, 2.5L}) {
      long double partial = 0;
      for (std::size_t i = 1; i <= 100000; ++i) partial += log_local_factor_unchecked(t.nth(i), k, r);
      const Bracket lg = log_g_k(k, r, 1e-14L);
      const long double big_p = t.nth(100000);
      // sum_{n > P} log(1 + n^-r / (1 - n^-r)) <= P^{1-r} / ((r-1)(1 - P^-r))
      const long double bound = std::pow(big_p, 1 - r) / ((r - 1) * (1 - std::pow(big_p, -r)));
      CHECK(partial < lg.hi);
      CHECK(lg.lo - partial < bound);
    }
  }
}
