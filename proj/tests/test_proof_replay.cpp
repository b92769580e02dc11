#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nwheat/proof_replay.hpp"
#include "support.hpp"

using namespace nwheat;
using testutil::P;

TEST_CASE("m_N selection on forced small cases") {
  REQUIRE(choose_mN(mpq_class(0), 4) == 4);   // 16 <= 4m < 20
  REQUIRE(choose_mN(mpq_class(0), 5) == 8);   // 32 <= 4m < 36
  REQUIRE(choose_mN(mpq_class(1), 3) == 4);   // 16 <= 4m < 20
  REQUIRE(choose_mN(mpq_class(0), 1) == 1);
}

TEST_CASE("m_N uniqueness and the reorganized window on random rational x0") {
  auto g = testutil::rng(123456);
  for (int i = 0; i < 1000; ++i) {
    mpq_class x0 = testutil::random_rational(g, 500, 40);
    if (x0 < 0) x0 = -x0;
    long N = 1 + static_cast<long>(g() % 20);
    mpz_class m = choose_mN(x0, N);
    mpq_class lhs = (x0 + 1) << N;
    // window: 2^N(1+x0) <= 4m < 2^N(1+x0)+4, and exactly one integer fits
    REQUIRE((lhs <= 4 * mpq_class(m)));
    REQUIRE((4 * mpq_class(m) < lhs + 4));
    REQUIRE_FALSE((lhs <= 4 * mpq_class(m - 1) && 4 * mpq_class(m - 1) < lhs + 4));
    REQUIRE_FALSE((lhs <= 4 * mpq_class(m + 1) && 4 * mpq_class(m + 1) < lhs + 4));
    // reorganized form: 4(m-1)/(1+x0) < 2^N <= 4m/(1+x0)
    mpq_class p2(mpz_class(1) << N);
    REQUIRE((4 * mpq_class(m - 1) / (x0 + 1) < p2));
    REQUIRE((p2 <= 4 * mpq_class(m) / (x0 + 1)));
  }
}

TEST_CASE("w_eps m_N selection: forced cases and the precondition") {
  // eps=1/2, x0=0, N=4: 4*16 = 64 <= 4m < 68 -> m = 16
  REQUIRE(choose_mN_weps(mpq_class(1, 2), mpq_class(0), 4) == 16);
  // marginal precondition 2^1 = 2 >= 2: allowed; 2*4 = 8 <= 4m < 12 -> m = 2
  REQUIRE(choose_mN_weps(mpq_class(1, 2), mpq_class(0), 2) == 2);
  // 2^1 = 2 >= 5 fails
  REQUIRE_THROWS_AS(choose_mN_weps(mpq_class(1, 2), mpq_class(3), 2), domain_error);
  // odd N: ball-decided path
  mpz_class m5 = choose_mN_weps(mpq_class(1, 2), mpq_class(0), 5);
  // (2^2.5) * 32 / 4 = 45.25...: m = 46
  REQUIRE(m5 == 46);
}

TEST_CASE("F_N log-weights match the direct arithmetic and stay positive") {
  const Precision p(128);
  // x0=0, m=4, k=4: ln F = 72 ln2 - 16 = 33.9066...
  SignedLog f = weight_FN_u1(mpq_class(0), mpz_class(4), 4, p);
  REQUIRE(f.sign == 1);
  REQUIRE(testutil::mid_close(f.logmag, 72 * 0.6931471805599453 - 16, 1e-12));

  // ratio F(k+1)/F(k) = exp(4 m ln2 - 2^k (1+x0))
  for (long k = 1; k <= 6; ++k) {
    SignedLog fk = weight_FN_u1(mpq_class(0), mpz_class(4), k, p);
    SignedLog fk1 = weight_FN_u1(mpq_class(0), mpz_class(4), k + 1, p);
    Ball lr = sub(fk1.logmag, fk.logmag, p);
    double expect = 16 * 0.6931471805599453 - std::exp2(k);
    REQUIRE(testutil::mid_close(lr, expect, 1e-10));
  }
}

TEST_CASE("dominance fails at N=1 and holds from N0 on; find_N0 is deterministic") {
  DominanceResult d1 = dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, 1);
  REQUIRE_FALSE(d1.passed);
  REQUIRE_FALSE(d1.inconclusive);
  REQUIRE(d1.lhs.sign == 1);
  REQUIRE(d1.rhs.sign == 1);

  auto n0 = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 25);
  REQUIRE(n0.has_value());
  REQUIRE(*n0 <= 25);
  // dominance holds at N0 and N0+1 by definition
  REQUIRE(dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, *n0).passed);
  REQUIRE(dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, *n0 + 1).passed);
  // fails just below (otherwise N0 would be smaller)
  if (*n0 > 1)
    REQUIRE_FALSE(dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, *n0 - 1).passed);

  auto again = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 25);
  REQUIRE(again == n0);

  auto n0b = find_N0(SolutionKind::U1, mpq_class(5, 2), std::nullopt, 25);
  REQUIRE(n0b.has_value());
}

TEST_CASE("double-precision log-table oracle agrees with dominance decisions") {
  // Independent check in plain doubles (margins are huge away from N0).
  auto dominance_double = [](double x0, long N) {
    double m = std::ceil(std::exp2(static_cast<double>(N)) * (1 + x0) / 4);
    auto lnF = [&](long k) {
      return 2 * m * (2 * k + 1) * std::log(2.0) - std::exp2(static_cast<double>(k)) * (1 + x0);
    };
    double lhs = -1e300;
    for (long k = 1; k <= N + 40; ++k) {
      if (k == N) continue;
      double v = lnF(k) + 2 * k * std::log(2.0);
      lhs = std::max(lhs, v) + std::log1p(std::exp(std::min(lhs, v) - std::max(lhs, v)));
    }
    return lhs <= lnF(N) - std::log(100.0);
  };
  for (long N = 2; N <= 14; ++N) {
    DominanceResult d = dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, N);
    bool dd = dominance_double(0.0, N);
    INFO("N=" << N);
    REQUIRE(d.passed == dd);
  }
}

TEST_CASE("F_N(N) is the largest tabulated term whenever dominance passes") {
  auto n0 = find_N0(SolutionKind::U1, mpq_class(1), std::nullopt, 20);
  REQUIRE(n0.has_value());
  for (long N = *n0; N <= *n0 + 3; ++N) {
    DominanceResult d = dominance_check(SolutionKind::U1, mpq_class(1), std::nullopt, N);
    REQUIRE(d.passed);
    const SignedLog& fN = d.f_table[static_cast<std::size_t>(N - 1)];
    for (long k = 1; k <= d.terms_used; ++k) {
      if (k == N) continue;
      REQUIRE(sl_certainly_greater_mag(fN, d.f_table[static_cast<std::size_t>(k - 1)]));
    }
  }
}

TEST_CASE("lower bound check passes at the origin with the cosine-row slack") {
  auto n0 = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 20);
  REQUIRE(n0.has_value());
  long N = *n0;
  LowerBoundResult lb = lower_bound_check(SolutionId::u1(), mpq_class(0), ExactReal(0), N);
  REQUIRE(lb.passed);
  REQUIRE_FALSE(lb.inconclusive);
  // at t0 = 0 the even derivative is exactly zero and the odd one carries
  // |h^(2m+1)(0)| >= 2^(2N+1) F_N(N)
  REQUIRE(lb.d_even.value.is_exact_zero());
  const Precision p(128);
  SignedLog strong(1, add(weight_FN_u1(mpq_class(0), lb.mN, N, p).logmag,
                          mul(Ball::from_si(2 * N + 1, p), ln2_ball(p), p), p));
  auto cmp = sl_certified_geq(lb.lhs, strong);
  REQUIRE(cmp.has_value());
  REQUIRE(*cmp);
}

TEST_CASE("chain consistency: lhs + 4 * off-N sum dominates F_N(N) at passing N") {
  // lower_bound lhs >= F_N(N) - 4 sum_{k != N} 2^(2k) F_N(k): verify the
  // reproduced direction lhs + 4*sum >= F_N(N).
  auto n0 = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 16);
  REQUIRE(n0.has_value());
  const Precision p(192);
  for (long N = *n0; N <= *n0 + 2; ++N) {
    DominanceResult dom = dominance_check(SolutionKind::U1, mpq_class(0), std::nullopt, N);
    LowerBoundResult lb = lower_bound_check(SolutionId::u1(), mpq_class(0),
                                            ExactReal(mpq_class(1)), N);
    std::vector<SignedLog> terms;
    terms.push_back(lb.lhs);
    terms.emplace_back(1, add(dom.lhs.logmag, mul_2si(ln2_ball(p), 1), p));
    auto total = log_sum_exp(terms, p);
    REQUIRE(total.has_value());
    SignedLog fN = weight_FN_u1(mpq_class(0), lb.mN, N, p);
    auto cmp = sl_certified_geq(*total, fN);
    REQUIRE(cmp.has_value());
    REQUIRE(*cmp);
  }
}

TEST_CASE("growth scan: roots clear 10^3 by N=20 at the origin and beat the floor") {
  SolutionId u1 = SolutionId::u1();
  auto n0 = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 20);
  REQUIRE(n0.has_value());
  GrowthScan scan = taylor_growth_scan(u1, mpq_class(0), ExactReal(0), *n0, 14);
  const Precision p(128);
  SignedLog thousand(1, log(Ball::from_si(1000, p), p));
  bool above_thousand = false;
  for (const auto& row : scan.rows) {
    if (row.zero_derivative) {
      REQUIRE(row.order % 2 == 0);  // the origin kills exactly the sine rows
      continue;
    }
    REQUIRE(row.root.has_value());
    REQUIRE(row.row_ok.has_value());
    REQUIRE(*row.row_ok);
    if (sl_certified_geq(*row.root, thousand).value_or(false)) above_thousand = true;
  }
  REQUIRE(above_thousand);
  for (const auto& [N, ok] : scan.pair_ok) {
    REQUIRE(ok.has_value());
    REQUIRE(*ok);
  }
}

TEST_CASE("w_eps replay: dominance and lower bound pass above N0") {
  mpq_class eps(1, 2);
  auto n0 = find_N0(SolutionKind::WEPS, mpq_class(0), eps, 20);
  REQUIRE(n0.has_value());
  DominanceResult d = dominance_check(SolutionKind::WEPS, mpq_class(0), eps, *n0);
  REQUIRE(d.passed);
  LowerBoundResult lb = lower_bound_check(SolutionId::weps(eps), mpq_class(0),
                                          ExactReal(ExactReal::sqrt_of(2)), *n0);
  REQUIRE(lb.passed);
}

TEST_CASE("replay record assembles all the pieces") {
  auto n0 = find_N0(SolutionKind::U1, mpq_class(0), std::nullopt, 20);
  ProofReplayRecord rec = replay_record(SolutionId::u1(), mpq_class(0), ExactReal(0), *n0);
  REQUIRE(rec.dominance);
  REQUIRE(rec.lower_bound_ok);
  REQUIRE(rec.coefficient_root.has_value());
  REQUIRE_FALSE(rec.f_table.empty());
  for (const auto& f : rec.f_table) REQUIRE(f.sign == 1);
}

TEST_CASE("analytic floor base grows like m_N/2 at x0 = 0") {
  const Precision p(128);
  for (long N : {12L, 14L, 16L}) {
    mpz_class m = choose_mN(mpq_class(0), N);
    auto lfb = nwheat::detail::ln_floor_base(SolutionId::u1(), mpq_class(0), N, m, p);
    REQUIRE(lfb.has_value());
    // (m-1)^2/(2m+1) ~ m/2: the ratio of logs approaches 1
    Ball ref = log(div(Ball::from_mpz(m, p), Ball::from_si(2, p), p), p);
    Ball ratio = div(*lfb, ref, p);
    REQUIRE(testutil::mid_close(ratio, 1.0, 0.05));
  }
}
