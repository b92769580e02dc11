#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "nwheat/signed_log.hpp"
#include "support.hpp"

using namespace nwheat;
using testutil::P;

TEST_CASE("log_sum_exp of ln2 and ln3 encloses ln5") {
  const Precision p(128);
  std::vector<SignedLog> terms{
      SignedLog(1, log(Ball::from_si(2, p), p)),
      SignedLog(1, log(Ball::from_si(3, p), p)),
  };
  auto s = log_sum_exp(terms, p);
  REQUIRE(s.has_value());
  REQUIRE(s->sign == 1);
  Ball ln5 = log(Ball::from_si(5, p), p);
  REQUIRE(testutil::mid_close(s->logmag, ln5.mid_double(), 1e-30));
}

TEST_CASE("exact cancellation of identical magnitudes gives exact zero") {
  const Precision p(128);
  Ball lm = Ball::from_rational(mpq_class(314159, 1024), p);  // dyadic: exactly representable
  std::vector<SignedLog> terms{SignedLog(1, lm), SignedLog(-1, lm)};
  auto s = log_sum_exp(terms, p);
  REQUIRE(s.has_value());
  REQUIRE(s->is_zero());
}

TEST_CASE("near-cancellation below precision reports an indeterminate sign") {
  const Precision p(64);
  Ball lm = log(Ball::from_si(7, p), p);  // carries a rounding radius
  std::vector<SignedLog> terms{SignedLog(1, lm), SignedLog(-1, lm)};
  // Same magnitude but through an inexact log: the sum ball straddles zero.
  Ball lm2 = lm;
  lm2.add_rad(nwheat::detail::abs_up(Ball::from_double(1e-18, p).mid()));
  std::vector<SignedLog> noisy{SignedLog(1, lm), SignedLog(-1, lm2)};
  auto s = log_sum_exp(noisy, p);
  REQUIRE_FALSE(s.has_value());
}

TEST_CASE("a dominated term only perturbs the leading magnitude at rounding level") {
  const Precision p(128);
  std::vector<SignedLog> terms{
      SignedLog(1, Ball::from_si(1000000, p)),
      SignedLog(1, Ball::exact_zero(p)),  // ln of 1
  };
  auto s = log_sum_exp(terms, p);
  REQUIRE(s.has_value());
  REQUIRE(s->sign == 1);
  // Encloses 1e6 + ln(1 + e^-1e6); the correction is far below the radius.
  REQUIRE(testutil::ball_contains_double(s->logmag, 1e6));
  nwheat::detail::Real width(32);
  mpfr_mul_2si(width.get(), s->logmag.rad(), 0, MPFR_RNDU);
  REQUIRE(mpfr_cmp_d(width.get(), 1e-20) < 0);
}

TEST_CASE("signed log round-trips with balls preserving containment") {
  const Precision p(128);
  Ball v = Ball::from_rational(mpq_class(-22, 7), p);
  SignedLog s = signed_log_from_ball(v, p);
  REQUIRE(s.sign == -1);
  Ball back = ball_from_signed_log(s, p);
  REQUIRE(back.contains_value(v.mid()));

  REQUIRE(signed_log_from_ball(Ball::exact_zero(p), p).is_zero());
  Ball straddle = sub(Ball::from_si(1, p), Ball::from_si(1, p), p);
  REQUIRE(straddle.is_exact_zero());  // exact arithmetic: still exact zero
  Ball noisy = sin(pi_ball(p), p);
  REQUIRE_FALSE(try_signed_log_from_ball(noisy, p).has_value());
}

TEST_CASE("certified magnitude comparisons require a separating gap") {
  const Precision p(128);
  SignedLog big(1, Ball::from_si(10, p));
  SignedLog small(-1, Ball::from_si(9, p));
  REQUIRE(sl_certainly_greater_mag(big, small));
  REQUIRE_FALSE(sl_certainly_greater_mag(small, big));
  auto geq = sl_certified_geq(big, small);
  REQUIRE(geq.has_value());
  REQUIRE(*geq);

  // Overlapping logmags: inconclusive, never guessed.
  Ball wide = Ball::from_si(10, p);
  wide.add_rad(nwheat::detail::abs_up(Ball::from_si(2, p).mid()));
  auto r = sl_certified_geq(SignedLog(1, wide), SignedLog(1, Ball::from_si(10, p)));
  REQUIRE_FALSE(r.has_value());
}
