#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nwheat/envelope.hpp"
#include "support.hpp"

using namespace nwheat;
using testutil::P;

TEST_CASE("choose_K: reference value, scan oracle, and both inequality forms") {
  REQUIRE(choose_K(mpq_class(1, 2), mpq_class(200)) == 14);
  REQUIRE_THROWS_AS(choose_K(mpq_class(1, 2), mpq_class(100)), domain_error);

  // scan oracle: K is the unique integer in the window
  const Precision p(192);
  mpq_class eps(1, 2);
  auto g = testutil::rng(778899);
  std::uniform_int_distribution<long> xs(101, 1000000);
  long prev_K = 0;
  mpq_class prev_x = 0;
  for (int i = 0; i < 100; ++i) {
    mpq_class x(xs(g), 1 + static_cast<long>(g() % 7));
    if (x <= 100) x += 101;
    long K = choose_K(eps, x);
    Ball denom = sub(nwheat::detail::pow2_rational(eps + 1, p), Ball::from_si(1, p), p);
    Ball D = div(log(div(Ball::from_rational(x, p), denom, p), p),
                 mul(Ball::from_rational(eps, p), ln2_ball(p), p), p);
    long hits = 0;
    for (long Kp = 1; Kp <= 60; ++Kp) {
      Ball kb = Ball::from_si(Kp, p);
      if (certainly_leq(D, kb) && certainly_less(sub(kb, Ball::from_si(1, p), p), D))
        ++hits;
      // both-forms cross-check for the selected K happens inside choose_K
    }
    REQUIRE(hits == 1);
    REQUIRE(mpq_class(K) * eps >= 4);
    // nondecreasing in x on samples
    if (i > 0 && x >= prev_x) REQUIRE(K >= prev_K);
    if (i == 0 || x >= prev_x) {
      prev_K = K;
      prev_x = x;
    }
  }
}

TEST_CASE("envelope constants at eps = 1/2 hit the derived windows") {
  const Precision p(128);
  EnvelopeCertificate c = envelope_constants(mpq_class(1, 2), p);
  // B2 = 2 (2^0.5 / (2^1.5 - 1))^2 = 1.19647789...
  REQUIRE(testutil::encloses_literal(c.B2, 1.1964778979177453, 1e-13));
  REQUIRE(mpfr_cmp_d(c.B2.mid(), 1.1964) > 0);
  REQUIRE(mpfr_cmp_d(c.B2.mid(), 1.1965) < 0);
  REQUIRE(testutil::encloses_literal(c.B3, 1.0065373337223185, 1e-13));
  REQUIRE(mpfr_cmp_d(c.B3.mid(), 1.0065) > 0);
  REQUIRE(mpfr_cmp_d(c.B3.mid(), 1.0066) < 0);
  // A2 equals B2 exactly (same ball)
  REQUIRE(mpfr_equal_p(c.A2.mid(), c.B2.mid()));
  REQUIRE(mpfr_equal_p(c.A2.rad(), c.B2.rad()));
  // A1 >= max(B1, 2 + B3), all positive
  REQUIRE(certainly_positive(c.B1));
  REQUIRE_FALSE(certainly_less(c.A1, c.B1));
  REQUIRE_FALSE(certainly_less(c.A1, add(Ball::from_si(2, p), c.B3, p)));
}

TEST_CASE("B1 dominates sampled partial sums of g_k on [0, 100]") {
  const Precision p(128);
  mpq_class eps(1, 2);
  EnvelopeCertificate c = envelope_constants(eps, p);
  auto g = testutil::rng(31007);
  for (int i = 0; i < 20; ++i) {
    mpq_class x(static_cast<long>(g() % 10000), 100);  // [0, 100)
    Ball sum = Ball::exact_zero(p);
    for (long k = 1; k <= 40; ++k) {
      Ball e = nwheat::detail::pow2_rational(eps * k, p);
      sum = add(sum, exp(mul_2si(sub(Ball::from_rational(x, p), e, p), k), p), p);
    }
    REQUIRE_FALSE(certainly_less(c.B1, sum));
  }
}

TEST_CASE("g_k ratio law and the monotone flip at the K window") {
  // ratio g_{k+1}(x)/g_k(x) = exp(2^k [x - 2^(eps k)(2^(1+eps)-1)]);
  // increasing for k < K, decreasing for k >= K.
  const Precision p(192);
  mpq_class eps(1, 2);
  for (mpq_class x : {mpq_class(200), mpq_class(500), mpq_class(4001, 10)}) {
    long K = choose_K(eps, x);
    Ball denom = sub(nwheat::detail::pow2_rational(eps + 1, p), Ball::from_si(1, p), p);
    for (long k = 1; k <= K + 6; ++k) {
      Ball e = nwheat::detail::pow2_rational(eps * k, p);
      Ball g1 = exp(mul_2si(sub(Ball::from_rational(x, p), e, p), k), p);
      Ball e2 = nwheat::detail::pow2_rational(eps * (k + 1), p);
      Ball g2 = exp(mul_2si(sub(Ball::from_rational(x, p), e2, p), k + 1), p);
      Ball ratio = div(g2, g1, p);
      Ball law = exp(mul_2si(sub(Ball::from_rational(x, p), mul(e, denom, p), p), k), p);
      // computed ratio matches the law within ball radii (they overlap)
      nwheat::detail::Real rlo = ratio.lower(), rhi = ratio.upper();
      nwheat::detail::Real llo = law.lower(), lhi = law.upper();
      REQUIRE(mpfr_cmp(rlo.get(), lhi.get()) <= 0);
      REQUIRE(mpfr_cmp(llo.get(), rhi.get()) <= 0);
      Ball one = Ball::from_si(1, p);
      if (k <= K - 1) REQUIRE_FALSE(certainly_less(ratio, one));
      if (k >= K) REQUIRE_FALSE(certainly_less(one, ratio));
    }
  }
}

TEST_CASE("envelope check passes on the standard grid and is trivial for x >= 0") {
  const Precision p(128);
  mpq_class eps(1, 2);
  EnvelopeCertificate c = envelope_constants(eps, p);
  // coarse version of the acceptance grid (keeps the unit suite quick)
  EnvelopeCheckResult r = envelope_check(eps, c, mpq_class(-200), mpq_class(200), 11,
                                         mpq_class(-10), mpq_class(10), 5, p);
  REQUIRE(r.passed);
  REQUIRE(r.points == 55);

  // x >= 0: ratio below the positive-x majorant sum < 1
  EnvelopeCheckResult rp = envelope_check(eps, c, mpq_class(0), mpq_class(100), 6,
                                          mpq_class(-5), mpq_class(5), 3, p);
  REQUIRE(rp.passed);
  nwheat::detail::Real hi = rp.max_ratio.upper();
  REQUIRE(mpfr_cmp_d(hi.get(), 1.0) < 0);
}
