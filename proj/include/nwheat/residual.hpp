#pragma once

#include <utility>
#include <vector>

#include "nwheat/derivatives.hpp"
#include "nwheat/envelope.hpp"

namespace nwheat {

/// Per-term frequency identity behind the heat equation for u1 and w_eps:
/// 2^(2k+1) = 2 (2^k)^2, exact integers. Each term is a translated decaying
/// plane wave solving the equation exactly.
inline bool per_term_heat_identity(long kmax) {
  for (long k = 1; k <= kmax; ++k) {
    mpz_class freq = mpz_class(1) << (2 * k + 1);
    mpz_class spatial = mpz_class(1) << k;
    if (freq != 2 * spatial * spatial) return false;
  }
  return true;
}

struct ResidualPoint {
  mpq_class x, t;
  Ball residual;
};

struct ResidualResult {
  Ball max_residual;     // enclosure of max |FD_t - FD_xx| over the grid
  Ball fd_error_budget;  // a-priori h^2 budget from derivative bounds
  std::vector<ResidualPoint> points;
  long skipped = 0;      // u2 points dropped to keep the stencil 10h clear of shifts
};

namespace detail {

// Cell-centered grid: stencils at the sample points stay interior to the
// solution's domain (endpoint placement would push the x-stencil of u1/u2
// through x = 0).
inline std::vector<mpq_class> cell_centers(const mpq_class& lo, const mpq_class& hi,
                                           long n) {
  std::vector<mpq_class> v;
  for (long i = 0; i < n; ++i)
    v.push_back(lo + (hi - lo) * mpq_class(2 * i + 1, 2 * n));
  return v;
}

// Uniform bound of |d^4/dx^4| of the trig series at spatial point x:
// each term is Im[a_k e^(i omega t) e^(-2^k (1+i) x)], so the fourth
// x-derivative carries |(1+i)|^4 2^(4k) = 4 * 2^(4k).
inline Ball trig_dx4_bound(const SolutionId& id, const mpq_class& x, Precision p) {
  Ball minus_ln2 = neg(ln2_ball(p));
  Ball acc = Ball::exact_zero(p);
  long k = 1;
  for (;; ++k) {
    Ball lna = id.kind == SolutionKind::WEPS
                   ? neg(add(pow2_rational((id.eps + 1) * k, p),
                             Ball::from_rational(x * (mpz_class(1) << k), p), p))
                   : Ball::from_rational(-((x + 1) << k), p);
    Ball term = mul_2si(exp(lna, p), 4 * k + 2);  // 4 * 2^(4k) = 2^(4k+2)
    acc = add(acc, term, p);
    // ratio of consecutive bounds: 2^4 a_{k+1}/a_k, certified <= 1/2 and
    // decreasing beyond (the weight ratio shrinks doubly exponentially)
    Ball dlog = id.kind == SolutionKind::WEPS
                    ? neg(add(mul(pow2_rational((id.eps + 1) * k, p),
                                  sub(pow2_rational(id.eps + 1, p),
                                      Ball::from_si(1, p), p), p),
                              Ball::from_rational(x * (mpz_class(1) << k), p), p))
                    : Ball::from_rational(-((x + 1) << k), p);
    Ball lr = add(mul(Ball::from_si(4, p), ln2_ball(p), p), dlog, p);
    if (k >= 3 && certainly_leq(lr, minus_ln2)) break;
    if (k > 300) throw precision_cap_error("dx4 bound tail did not certify");
  }
  Ball lna_next = id.kind == SolutionKind::WEPS
                      ? neg(add(pow2_rational((id.eps + 1) * (k + 1), p),
                                Ball::from_rational(x * (mpz_class(1) << (k + 1)), p), p))
                      : Ball::from_rational(-((x + 1) << (k + 1)), p);
  Ball tail = mul_2si(exp(lna_next, p), 4 * k + 7);  // 2 * 4 * 2^(4(k+1))
  return add(acc, tail, p);
}

}  // namespace detail

/// Central finite-difference heat residual |FD_t - FD_xx| on a cell-centered
/// grid, with certified evaluations. Reports the grid maximum and the
/// a-priori truncation budget h^2 (|u_ttt|/6 + |u_xxxx|/12). For u2, points
/// whose t-stencil comes within 10h of a retained shift r_k are skipped
/// (stencil validity for the FD error expansion, not a property of u2).
inline ResidualResult residual_check(const SolutionId& id, const mpq_class& x_lo,
                                     const mpq_class& x_hi, long nx,
                                     const mpq_class& t_lo, const mpq_class& t_hi,
                                     long nt, const mpq_class& h,
                                     long bits = 128) {
  if (h <= 0) throw domain_error("step must be positive");
  Precision p{bits};
  std::vector<mpq_class> xs = detail::cell_centers(x_lo, x_hi, nx);
  std::vector<mpq_class> ts = detail::cell_centers(t_lo, t_hi, nt);

  EvalOptions opt;
  // FD divides by h^2; keep evaluation radii far below the h^2 scale.
  opt.target_rad = h * h * h * h / 1000000;
  opt.allow_extended_domain = true;

  auto value = [&](const mpq_class& x, const mpq_class& t) {
    return eval_solution(id, ExactReal(x), ExactReal(t), opt).value;
  };

  ResidualResult out{Ball::exact_zero(p), Ball::exact_zero(p), {}, 0};
  detail::Real max_lo(p.bits), max_hi(p.bits);
  mpfr_set_zero(max_lo.get(), 1);
  mpfr_set_zero(max_hi.get(), 1);

  Ball h2 = Ball::from_rational(h * h, p);
  Ball inv_2h = div(Ball::from_si(1, p), Ball::from_rational(2 * h, p), p);
  Ball inv_h2 = div(Ball::from_si(1, p), h2, p);

  for (const mpq_class& x : xs) {
    for (const mpq_class& t : ts) {
      if (id.kind == SolutionKind::U2) {
        // stencil validity: |t +- {0, h} - r_k| >= 10h for retained k
        EvalResult probe = eval_solution(id, ExactReal(x), ExactReal(t), opt);
        bool clear = true;
        for (long k = 1; k <= probe.terms_used && clear; ++k) {
          mpq_class rk = enumerate_rational(static_cast<unsigned long>(k));
          if (::abs(t - rk) < 10 * h) clear = false;
        }
        if (!clear) {
          ++out.skipped;
          continue;
        }
      }
      Ball fd_t = mul(sub(value(x, t + h), value(x, t - h), p), inv_2h, p);
      Ball center = value(x, t);
      Ball fd_xx = mul(sub(add(value(x + h, t), value(x - h, t), p),
                           mul_2si(center, 1), p),
                       inv_h2, p);
      Ball res = abs(sub(fd_t, fd_xx, p));
      out.points.push_back({x, t, res});
      detail::Real hi = res.upper();
      if (mpfr_cmp(hi.get(), max_hi.get()) > 0) {
        mpfr_set(max_hi.get(), hi.get(), MPFR_RNDU);
        detail::Real lo = res.lower();
        if (mpfr_sgn(lo.get()) < 0) mpfr_set_zero(lo.get(), 1);
        mpfr_set(max_lo.get(), lo.get(), MPFR_RNDD);
      }
    }
  }
  out.max_residual = Ball::from_endpoints(max_lo.get(), max_hi.get(), p);

  // Budget: h^2 (sup|u_ttt|/6 + sup|u_xxxx|/12) over the stencil hull.
  mpq_class x_min = xs.empty() ? x_lo : xs.front();
  Ball b_t3(p), b_x4(p);
  if (id.kind == SolutionKind::U2) {
    mpq_class y_min = x_min + 1 - h;
    b_t3 = kernel_dx_sup(6, ExactReal(y_min), p);
    b_x4 = kernel_dx_sup(4, ExactReal(y_min), p);
  } else {
    TimeDerivative d3 = time_derivative(id, 3, ExactReal(x_min), ExactReal(0));
    b_t3 = d3.weight_sum_bound;
    b_x4 = detail::trig_dx4_bound(id, x_min - h, p);
  }
  out.fd_error_budget =
      mul(h2, add(div(b_t3, Ball::from_si(6, p), p),
                  div(b_x4, Ball::from_si(12, p), p), p), p);
  return out;
}

}  // namespace nwheat
