#include <catch2/catch_amalgamated.hpp>

#include "nwheat/residual.hpp"
#include "nwheat/walczak.hpp"
#include "support.hpp"

using namespace nwheat;
using testutil::P;

TEST_CASE("per-term frequency identity holds exactly through k = 64") {
  REQUIRE(per_term_heat_identity(64));
}

TEST_CASE("u1 residual on the standard grid: below budget and h^2 scaling") {
  mpq_class h(1, 1000);
  ResidualResult r = residual_check(SolutionId::u1(), mpq_class(0), mpq_class(2), 5,
                                    mpq_class(-1), mpq_class(1), 5, h);
  REQUIRE(r.points.size() == 25);
  nwheat::detail::Real hi = r.max_residual.upper();
  REQUIRE(mpfr_cmp_d(hi.get(), 1e-4) <= 0);
  // every point is within the a-priori budget
  REQUIRE_FALSE(certainly_less(r.fd_error_budget, r.max_residual));

  ResidualResult r2 = residual_check(SolutionId::u1(), mpq_class(0), mpq_class(2), 5,
                                     mpq_class(-1), mpq_class(1), 5, h / 2);
  const Precision p(128);
  Ball ratio = div(r.max_residual, r2.max_residual, p);
  REQUIRE(mpfr_cmp_d(ratio.mid(), 3.5) >= 0);
  REQUIRE(mpfr_cmp_d(ratio.mid(), 4.5) <= 0);
}

TEST_CASE("w_eps residual is small on a mixed-sign grid") {
  mpq_class h(1, 1000);
  ResidualResult r = residual_check(SolutionId::weps(mpq_class(1, 2)),
                                    mpq_class(-2), mpq_class(2), 4,
                                    mpq_class(-1), mpq_class(1), 3, h);
  REQUIRE_FALSE(certainly_less(r.fd_error_budget, r.max_residual));
}

TEST_CASE("u2 residual respects the shift-clearance rule") {
  mpq_class h(1, 2000);
  // t range straddles many small rationals; the checker must skip the
  // stencils that come within 10h of a retained shift and stay finite.
  ResidualResult r = residual_check(SolutionId::u2(), mpq_class(0), mpq_class(1), 3,
                                    mpq_class(3), mpq_class(4), 3, h);
  REQUIRE(r.points.size() + static_cast<std::size_t>(r.skipped) == 9);
  if (!r.points.empty()) {
    nwheat::detail::Real hi = r.max_residual.upper();
    REQUIRE(mpfr_cmp_d(hi.get(), 1e-3) <= 0);
  }
}

TEST_CASE("walczak hypothesis data: reference point, monotone in delta0, zero for t < 0") {
  const Precision p(128);
  std::vector<mpq_class> grid{mpq_class(3, 2), mpq_class(2), mpq_class(5),
                              mpq_class(20), mpq_class(100)};
  WalczakCheck w = walczak_hypothesis_check(mpq_class(0), mpq_class(1, 2),
                                            mpq_class(1), 40, grid, p);
  REQUIRE(w.passed);
  REQUIRE(certainly_less(w.sup_observed, w.L));

  // n = 0 contribution at t = 1 would be Phi(1,1) = 0.2196956...; the sup
  // over the grid is at least that (checked at the closest grid value).
  WalczakCheck w0 = walczak_hypothesis_check(mpq_class(0), mpq_class(1, 2),
                                             mpq_class(1), 0,
                                             {mpq_class(101, 100)}, p);
  REQUIRE(testutil::mid_close(w0.sup_observed, 0.21914710959, 1e-9));

  // halving delta0 never increases the sup
  WalczakCheck wh = walczak_hypothesis_check(mpq_class(0), mpq_class(1, 4),
                                             mpq_class(1), 40, grid, p);
  REQUIRE_FALSE(certainly_less(w.sup_observed, wh.sup_observed));

  // negative-t grid points contribute exactly zero
  WalczakCheck wn = walczak_hypothesis_check(mpq_class(0), mpq_class(1, 2),
                                             mpq_class(1), 10,
                                             {mpq_class(-2), mpq_class(-30)}, p);
  REQUIRE(wn.sup_observed.is_exact_zero());

  REQUIRE_THROWS_AS(walczak_hypothesis_check(mpq_class(0), mpq_class(1, 2),
                                             mpq_class(1), 5, {mpq_class(1, 2)}, p),
                    domain_error);
}
