#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "nwheat/ball.hpp"
#include "nwheat/exact_real.hpp"
#include "nwheat/signed_log.hpp"

namespace nwheat {

/// Physicists' Hermite polynomial H_n(z) through the recurrence
/// H_{n+1} = 2 z H_n - 2 n H_{n-1}.
inline Ball hermite(long n, const Ball& z, Precision p) {
  if (n < 0) throw domain_error("hermite order must be nonnegative");
  Ball h0 = Ball::from_si(1, p);
  if (n == 0) return h0;
  Ball two_z = mul_2si(z, 1);
  Ball h1 = two_z;
  for (long k = 1; k < n; ++k) {
    Ball h2 = sub(mul(two_z, h1, p), mul(Ball::from_si(2 * k, p), h0, p), p);
    h0 = std::move(h1);
    h1 = std::move(h2);
  }
  return h1;
}

namespace detail {

// Sum of |coefficients| of H_m, exact. Used for the z -> infinity envelope
// |H_m(z)| <= M_m z^m (z >= 1).
inline mpz_class hermite_abs_coeff_sum(long m) {
  static std::map<long, mpz_class> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<mpz_class> prev{1}, cur{0, 2};
  if (m == 0) return cache.emplace(0, 1).first->second;
  for (long k = 1; k < m; ++k) {
    std::vector<mpz_class> next(static_cast<std::size_t>(k) + 2, mpz_class(0));
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2 * k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  mpz_class s = 0;
  for (const auto& c : cur) s += ::abs(c);
  return cache.emplace(m, s).first->second;
}

// G_m(z) = z^(m+1) |H_m(z)| e^(-z^2); the x-derivative magnitude factorizes
// as |d^m/dx^m Phi(y,s)| = pi^(-1/2) y^-(m+1) G_m(z) with z = y/(2 sqrt(s)),
// so the sup over s > 0 reduces to the y-independent sup of G_m.
inline Ball g_envelope(long m, const Ball& z, Precision p) {
  Ball h = abs(hermite(m, z, p));
  Ball zz = mul(z, z, p);
  return mul(mul(pow_int(z, m + 1, p), h, p), exp(neg(zz), p), p);
}

// H_{m-1} and H_m from one recurrence pass (H_{-1} taken as 0).
inline std::pair<Ball, Ball> hermite_pair(long m, const Ball& z, Precision p) {
  Ball h0 = Ball::from_si(1, p);
  if (m == 0) return {Ball::exact_zero(p), h0};
  Ball two_z = mul_2si(z, 1);
  Ball h1 = two_z;
  for (long k = 1; k < m; ++k) {
    Ball h2 = sub(mul(two_z, h1, p), mul(Ball::from_si(2 * k, p), h0, p), p);
    h0 = std::move(h1);
    h1 = std::move(h2);
  }
  return {h0, h1};
}

// Signed version z^(m+1) H_m(z) e^(-z^2) and its z-derivative
//   z^m e^(-z^2) [ (m+1) H_m + 2 m z H_{m-1} - 2 z^2 H_m ].
inline Ball g_signed(long m, const Ball& z, Precision p) {
  Ball h = hermite(m, z, p);
  Ball zz = mul(z, z, p);
  return mul(mul(pow_int(z, m + 1, p), h, p), exp(neg(zz), p), p);
}

inline Ball g_signed_deriv(long m, const Ball& z, Precision p) {
  auto [hm1, hm] = hermite_pair(m, z, p);
  Ball zz = mul(z, z, p);
  Ball bracket = mul(Ball::from_si(m + 1, p), hm, p);
  if (m >= 1)
    bracket = add(bracket, mul(mul(Ball::from_si(2 * m, p), z, p), hm1, p), p);
  bracket = sub(bracket, mul_2si(mul(zz, hm, p), 1), p);
  return mul(mul(pow_int(z, m, p), exp(neg(zz), p), p), bracket, p);
}

// Certified global sup of G_m over (0, infinity): interval branch-and-bound
// on [0, Z] plus the decreasing envelope M_m z^(2m+1) e^(-z^2) beyond Z.
// The objective is multimodal (one hump per Hermite sign change), so a
// bracketed local search would not certify anything.
inline Ball g_envelope_sup(long m, Precision p) {
  static std::map<std::pair<long, long>, Ball> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({m, p.bits});
    if (it != cache.end()) return it->second;
  }

  mpz_class mm = hermite_abs_coeff_sum(m);
  Ball mm_ball = Ball::from_mpz(mm, p);

  auto tail_at = [&](long Z) {
    // M_m Z^(2m+1) e^(-Z^2), an upper bound of G_m on [Z, inf) once
    // Z^2 >= (2m+1)/2 (and Z >= 1 so |H_m| <= M_m z^m applies).
    Ball zb = Ball::from_si(Z, p);
    return mul(mul(mm_ball, pow_int(zb, 2 * m + 1, p), p),
               exp(neg(mul(zb, zb, p)), p), p);
  };

  long Z = 2;
  while (Z * Z * 2 < 2 * m + 3) ++Z;
  Z += 2;

  for (int expand = 0; expand < 20; ++expand) {
    Real best_lo(p.bits);
    mpfr_set_zero(best_lo.get(), 1);

    struct Box {
      mpq_class lo, hi;
      Real ub;
      double key;  // ordering heuristic only; exact bounds live in ub
    };
    auto box_less = [](const Box& a, const Box& b) { return a.key < b.key; };

    auto make_box = [&](mpq_class lo, mpq_class hi) {
      Ball lo_b = Ball::from_rational(lo, p);
      Ball hi_b = Ball::from_rational(hi, p);
      Real l = lo_b.lower(), h = hi_b.upper();
      Ball zbox = Ball::from_endpoints(l.get(), h.get(), p);
      Ball g = g_envelope(m, zbox, p);
      Real ub = g.upper();

      // Centered form |G(c)| + |G'(box)| * w/2 is second order near the
      // peak, where the plain product form stalls at first order.
      mpq_class c = (lo + hi) / 2;
      Ball gc = g_signed(m, Ball::from_rational(c, p), p);
      Ball gp = g_signed_deriv(m, zbox, p);
      Ball halfw = Ball::from_rational((hi - lo) / 2, p);
      Ball centered = add(abs(gc), mul(abs(gp), halfw, p), p);
      Real cub = centered.upper();
      if (mpfr_cmp(cub.get(), ub.get()) < 0) mpfr_set(ub.get(), cub.get(), MPFR_RNDU);

      Box box{std::move(lo), std::move(hi), std::move(ub), 0.0};
      box.key = mpfr_get_d(box.ub.get(), MPFR_RNDU);
      // The center sample raises the certified lower bound.
      Real gl = gc.abs_lower();
      if (mpfr_cmp(gl.get(), best_lo.get()) > 0)
        mpfr_set(best_lo.get(), gl.get(), MPFR_RNDD);
      return box;
    };

    // Best-first: always split the box with the largest upper bound, so the
    // peak is located early and flank boxes prune in one visit.
    std::vector<Box> heap;
    heap.push_back(make_box(mpq_class(0), mpq_class(Z)));
    Real final_ub(p.bits);
    long budget = 200000;
    while (true) {
      std::pop_heap(heap.begin(), heap.end(), box_less);
      Box top = std::move(heap.back());
      heap.pop_back();
      Real slack(kRadPrec);
      mpfr_sub(slack.get(), top.ub.get(), best_lo.get(), MPFR_RNDU);
      Real tolr(kRadPrec);
      mpfr_mul_2si(tolr.get(), best_lo.get(), -44, MPFR_RNDD);
      bool tight = mpfr_sgn(slack.get()) <= 0 ||
                   mpfr_cmp(slack.get(), tolr.get()) <= 0;
      static const mpq_class min_width(mpz_class(1), mpz_class(1) << 64);
      if (tight || --budget <= 0 || (top.hi - top.lo) < min_width) {
        // The double key is only a heuristic, so take the exact maximum over
        // the popped box and the whole remaining frontier.
        mpfr_set(final_ub.get(), top.ub.get(), MPFR_RNDU);
        for (const Box& b : heap)
          if (mpfr_cmp(b.ub.get(), final_ub.get()) > 0)
            mpfr_set(final_ub.get(), b.ub.get(), MPFR_RNDU);
        if (mpfr_cmp(best_lo.get(), final_ub.get()) > 0)
          mpfr_set(final_ub.get(), best_lo.get(), MPFR_RNDU);
        break;
      }
      mpq_class mid2 = (top.lo + top.hi) / 2;
      heap.push_back(make_box(top.lo, mid2));
      std::push_heap(heap.begin(), heap.end(), box_less);
      heap.push_back(make_box(mid2, top.hi));
      std::push_heap(heap.begin(), heap.end(), box_less);
    }

    Ball tail = tail_at(Z);
    Real tail_ub = tail.upper();
    if (mpfr_cmp(tail_ub.get(), best_lo.get()) <= 0) {
      if (mpfr_cmp(tail_ub.get(), final_ub.get()) > 0)
        mpfr_set(final_ub.get(), tail_ub.get(), MPFR_RNDU);
      Ball s = Ball::from_endpoints(best_lo.get(), final_ub.get(), p);
      std::lock_guard<std::mutex> lock(mu);
      return cache.emplace(std::make_pair(m, p.bits), s).first->second;
    }
    Z *= 2;  // tail not yet dominated by the interior maximum
  }
  throw precision_cap_error("kernel sup search did not converge");
}

}  // namespace detail

/// Heat kernel: (4 pi t)^(-1/2) exp(-x^2 / (4 t)) for t > 0, identically 0
/// for t <= 0.
inline Ball phi(const Ball& x, const Ball& t, Precision p) {
  detail::Real thi = t.upper();
  if (mpfr_sgn(thi.get()) <= 0) return Ball::exact_zero(p);
  detail::Real tlo = t.lower();
  if (mpfr_sgn(tlo.get()) > 0) {
    Ball four_t = mul_2si(t, 2);
    Ball inv_norm = div(Ball::from_si(1, p),
                        sqrt(mul(pi_ball(p), four_t, p), p), p);
    Ball arg = neg(div(mul(x, x, p), four_t, p));
    return mul(inv_norm, exp(arg, p), p);
  }
  // t straddles 0: the value lies in [0, sup over s > 0 of Phi(|x|, s)].
  detail::Real ylo = abs(x).abs_lower();
  if (mpfr_sgn(ylo.get()) <= 0)
    throw undecidable_error("phi with t straddling 0 needs |x| bounded away from 0");
  Ball y = Ball::point(ylo.get(), p);
  Ball sup = div(mul(detail::g_envelope_sup(0, p),
                     div(Ball::from_si(1, p), sqrt(pi_ball(p), p), p), p),
                 y, p);
  detail::Real zero(p.bits), ub = sup.upper();
  mpfr_set_zero(zero.get(), 1);
  return Ball::from_endpoints(zero.get(), ub.get(), p);
}

inline Ball phi(const ExactReal& x, const ExactReal& t, Precision p) {
  return phi(x.to_ball(p), t.to_ball(p), p);
}

/// sup over s > 0 of |d^m/dx^m Phi(y, s)| = pi^(-1/2) y^-(m+1) sup G_m.
inline Ball kernel_dx_sup(long m, const ExactReal& y, Precision p) {
  Ball yb = y.to_ball(p);
  if (!certainly_positive(yb)) throw domain_error("kernel sup needs y > 0");
  Ball s = detail::g_envelope_sup(m, p);
  Ball inv_sqrt_pi = div(Ball::from_si(1, p), sqrt(pi_ball(p), p), p);
  return mul(mul(s, inv_sqrt_pi, p), pow_int(yb, -(m + 1), p), p);
}

/// n-th spatial derivative of the heat kernel:
/// d^n/dx^n Phi = (-1)^n (4t)^(-n/2) H_n(x / (2 sqrt(t))) Phi(x, t),
/// extended by zero for t <= 0 (smooth junction).
inline Ball phi_dx(long n, const Ball& x, const Ball& t, Precision p) {
  if (n < 0) throw domain_error("derivative order must be nonnegative");
  if (n == 0) return phi(x, t, p);
  detail::Real thi = t.upper();
  if (mpfr_sgn(thi.get()) <= 0) return Ball::exact_zero(p);
  detail::Real tlo = t.lower();
  if (mpfr_sgn(tlo.get()) > 0) {
    Ball four_t = mul_2si(t, 2);
    Ball inv_sqrt_4t = div(Ball::from_si(1, p), sqrt(four_t, p), p);
    Ball z = mul(x, inv_sqrt_4t, p);
    Ball ph = mul(div(inv_sqrt_4t, sqrt(pi_ball(p), p), p),
                  exp(neg(mul(z, z, p)), p), p);
    Ball v = mul(mul(pow_int(inv_sqrt_4t, n, p), hermite(n, z, p), p), ph, p);
    return (n % 2 == 1) ? neg(v) : v;
  }
  // t straddles 0: bound by the global sup over s > 0.
  detail::Real ylo = abs(x).abs_lower();
  if (mpfr_sgn(ylo.get()) <= 0)
    throw undecidable_error("phi_dx with t straddling 0 needs |x| bounded away from 0");
  Ball sup = kernel_dx_sup(n, ExactReal(1), p);  // placeholder, rescaled below
  // Rescale by y^-(n+1) relative to y = 1.
  Ball y = Ball::point(ylo.get(), p);
  sup = mul(sup, pow_int(y, -(n + 1), p), p);
  Ball b = abs(sup);
  detail::Real ub = b.upper();
  detail::Real lo2(p.bits);
  mpfr_neg(lo2.get(), ub.get(), MPFR_RNDD);
  return Ball::from_endpoints(lo2.get(), ub.get(), p);
}

inline Ball phi_dx(long n, const ExactReal& x, const ExactReal& t, Precision p) {
  return phi_dx(n, x.to_ball(p), t.to_ball(p), p);
}

/// n-th time derivative, computed through the identity
/// d^n/dt^n Phi = d^(2n)/dx^(2n) Phi (single code path).
inline Ball phi_dt(long n, const Ball& x, const Ball& t, Precision p) {
  return phi_dx(2 * n, x, t, p);
}

inline Ball phi_dt(long n, const ExactReal& x, const ExactReal& t, Precision p) {
  return phi_dt(n, x.to_ball(p), t.to_ball(p), p);
}

/// Certified upper enclosure of sup over s > 0 of |d^n/dt^n Phi(y, s)|.
struct KernelDerivativeBound {
  long order;
  ExactReal y;
  Ball bound;
};

inline KernelDerivativeBound kernel_derivative_sup(long n, const ExactReal& y,
                                                   Precision p) {
  return {n, y, kernel_dx_sup(2 * n, y, p)};
}

/// Smallest empirical constant C making
///   |d^n/dx^n Phi(x,t)| <= C^n n^(n/2) t^-(n+1)/2 e^(-x^2/(8t))
/// hold on the grid for 1 <= n <= nmax. Diagnostic, not a proof: the result
/// is only as good as the grid.
inline Ball verify_kahane_bound(long nmax,
                                const std::vector<std::pair<mpq_class, mpq_class>>& grid,
                                Precision p) {
  detail::Real max_lo(p.bits), max_ub(p.bits);
  bool any = false;
  for (const auto& [x, t] : grid) {
    if (t <= 0) throw domain_error("Kahane grid needs t > 0");
    Ball tb = Ball::from_rational(t, p);
    Ball xb = Ball::from_rational(x, p);
    Ball ln_t = log(tb, p);
    Ball x2_8t = div(mul(xb, xb, p), mul_2si(tb, 3), p);
    for (long n = 1; n <= nmax; ++n) {
      Ball d = phi_dx(n, xb, tb, p);
      detail::Real dub = d.abs_upper();
      if (mpfr_zero_p(dub.get())) continue;  // zero derivative: no constraint
      Ball ln_d = log(Ball::point(dub.get(), p), p);
      // ln C = (1/n)[ ln|d| + (n+1)/2 ln t + x^2/(8t) - (n/2) ln n ]
      Ball ln_c = add(ln_d, mul(Ball::from_rational(mpq_class(n + 1, 2), p), ln_t, p), p);
      ln_c = add(ln_c, x2_8t, p);
      ln_c = sub(ln_c, mul(Ball::from_rational(mpq_class(n, 2), p),
                           log(Ball::from_si(n, p), p), p), p);
      ln_c = div(ln_c, Ball::from_si(n, p), p);
      detail::Real lo = ln_c.lower(), ub = ln_c.upper();
      if (!any || mpfr_cmp(lo.get(), max_lo.get()) > 0)
        mpfr_set(max_lo.get(), lo.get(), MPFR_RNDD);
      if (!any || mpfr_cmp(ub.get(), max_ub.get()) > 0)
        mpfr_set(max_ub.get(), ub.get(), MPFR_RNDU);
      any = true;
    }
  }
  if (!any) return Ball::exact_zero(p);  // n = 0 alone constrains nothing
  return exp(Ball::from_endpoints(max_lo.get(), max_ub.get(), p), p);
}

}  // namespace nwheat
