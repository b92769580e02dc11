#pragma once

#include <vector>

#include "nwheat/heat_kernel.hpp"

namespace nwheat {

/// Observed hypothesis data for the condensation lemma: with
/// phi(t) = Phi(x0+1, t), the quantity sup_{n <= nmax, t in grid} of
/// |phi^(n)(t)| delta0^n / n! for |t| > A. The returned L is a candidate
/// constant (twice the observed sup); this is evidence the bound is
/// satisfiable on the sampled range, not a derivation of a sharp constant.
struct WalczakCheck {
  mpq_class delta0;
  mpq_class A;
  long nmax = 0;
  Ball sup_observed;
  Ball L;
  bool passed = false;  // sup_observed < L, with a finite sup
};

inline WalczakCheck walczak_hypothesis_check(const mpq_class& x0,
                                             const mpq_class& delta0,
                                             const mpq_class& A, long nmax,
                                             const std::vector<mpq_class>& t_grid,
                                             Precision p) {
  if (delta0 <= 0) throw domain_error("delta0 must be positive");
  if (A <= 0) throw domain_error("A must be positive");
  if (x0 < 0) throw domain_error("u2 context requires x0 >= 0");
  for (const mpq_class& t : t_grid)
    if (::abs(t) <= A)
      throw domain_error("t grid must satisfy |t| > A");

  const mpq_class y = x0 + 1;
  Ball yb = Ball::from_rational(y, p);
  Ball d0 = Ball::from_rational(delta0, p);

  detail::Real max_lo(p.bits), max_hi(p.bits);
  mpfr_set_zero(max_lo.get(), 1);
  mpfr_set_zero(max_hi.get(), 1);

  mpz_class fact = 1;
  Ball d0_pow = Ball::from_si(1, p);
  for (long n = 0; n <= nmax; ++n) {
    if (n > 0) {
      fact *= n;
      d0_pow = mul(d0_pow, d0, p);
    }
    Ball scale = div(d0_pow, Ball::from_mpz(fact, p), p);
    for (const mpq_class& t : t_grid) {
      if (t < 0) continue;  // derivatives vanish identically for t < 0
      Ball d = phi_dt(n, yb, Ball::from_rational(t, p), p);
      Ball v = mul(abs(d), scale, p);
      detail::Real hi = v.upper();
      if (mpfr_cmp(hi.get(), max_hi.get()) > 0) {
        mpfr_set(max_hi.get(), hi.get(), MPFR_RNDU);
        detail::Real lo = v.lower();
        if (mpfr_sgn(lo.get()) < 0) mpfr_set_zero(lo.get(), 1);
        mpfr_set(max_lo.get(), lo.get(), MPFR_RNDD);
      }
    }
  }

  Ball sup = Ball::from_endpoints(max_lo.get(), max_hi.get(), p);
  Ball L = sup.is_exact_zero() ? Ball::from_si(1, p)
                               : mul_2si(Ball::point(sup.upper().get(), p), 1);
  bool finite = mpfr_number_p(sup.mid()) && mpfr_number_p(sup.rad());
  return {delta0, A, nmax, sup, L, finite && certainly_less(sup, L)};
}

}  // namespace nwheat
