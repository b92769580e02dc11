#pragma once

#include <utility>
#include <vector>

#include "nwheat/solutions.hpp"

namespace nwheat {

/// Unique positive K with
///   (1/eps) log2(x / (2^(1+eps)-1)) <= K < 1 + (1/eps) log2(x / (2^(1+eps)-1)),
/// equivalently x/(2^(1+eps)-1) <= 2^(eps K) < 2^eps x/(2^(1+eps)-1).
/// Requires x > 100 (below that the uniform bound B1 applies). The returned
/// K is re-verified against both forms and against K >= 4/eps.
inline long choose_K(const mpq_class& eps, const mpq_class& x,
                     long start_bits = 128) {
  if (eps <= 0 || eps >= 1) throw domain_error("eps must lie in (0,1)");
  if (x <= 100) throw domain_error("choose_K requires x > 100");

  long bits = start_bits;
  while (true) {
    Precision p{bits};
    Ball denom = sub(detail::pow2_rational(eps + 1, p), Ball::from_si(1, p), p);
    Ball ratio = div(Ball::from_rational(x, p), denom, p);
    Ball D = div(log(ratio, p), mul(Ball::from_rational(eps, p), ln2_ball(p), p), p);

    detail::Real lo = D.lower(), hi = D.upper();
    mpz_class clo, chi;
    mpfr_get_z(clo.get_mpz_t(), lo.get(), MPFR_RNDU);  // ceil
    mpfr_get_z(chi.get_mpz_t(), hi.get(), MPFR_RNDU);
    if (clo == chi && clo.fits_slong_p()) {
      long K = clo.get_si();
      // Form 1: D <= K < 1 + D.
      Ball Kb = Ball::from_si(K, p);
      bool f1 = certainly_leq(D, Kb) &&
                certainly_less(sub(Kb, Ball::from_si(1, p), p), D);
      // Form 2: x/(2^(1+eps)-1) <= 2^(eps K) < 2^eps x/(2^(1+eps)-1).
      Ball pK = detail::pow2_rational(eps * K, p);
      bool f2 = certainly_leq(ratio, pK) &&
                certainly_less(pK, mul(detail::pow2_rational(eps, p), ratio, p));
      bool f3 = mpq_class(K) * eps >= 4;  // exact
      if (f1 && f2 && f3) return K;
    }
    if (bits >= precision_cap())
      throw undecidable_error("choose_K boundary undecidable at cap");
    bits = std::min(bits * 2, precision_cap());
  }
}

/// Derived constants for the growth bound
///   |w_eps(x,t)| <= A1 exp(A2 |x|^(1 + 1/eps)).
/// A2 = B2 exactly; A1 >= max(B1, 2 + B3). Related to the order-(2+delta)
/// growth statement through eps = 1/(1+delta).
struct EnvelopeCertificate {
  mpq_class eps;
  Ball B1;  // certified sup of sum_k g_k(x) over x in [0, 100]
  Ball B2;  // 2 (2^eps / (2^(1+eps) - 1))^(1/eps)
  Ball B3;  // sum_{j>=1} exp(-(2^eps - 1)(2^j - 1))
  Ball A1;
  Ball A2;
};

inline EnvelopeCertificate envelope_constants(const mpq_class& eps,
                                              Precision p) {
  if (eps <= 0 || eps >= 1) throw domain_error("eps must lie in (0,1)");

  // B2 = 2 (2^eps / (2^(1+eps) - 1))^(1/eps)
  Ball denom = sub(detail::pow2_rational(eps + 1, p), Ball::from_si(1, p), p);
  Ball base = div(detail::pow2_rational(eps, p), denom, p);
  Ball B2 = mul_2si(exp(div(log(base, p), Ball::from_rational(eps, p), p), p), 1);

  // B3 = sum_j exp(-(2^eps - 1)(2^j - 1)); ratio exp(-(2^eps - 1) 2^j)
  // certifies <= 1/2 almost immediately, giving a geometric tail.
  Ball c = sub(detail::pow2_rational(eps, p), Ball::from_si(1, p), p);
  Ball B3 = Ball::exact_zero(p);
  Ball minus_ln2 = neg(ln2_ball(p));
  detail::Real tiny(detail::kRadPrec);
  mpfr_set_ui_2exp(tiny.get(), 1, -p.bits - 4, MPFR_RNDU);
  long j = 1;
  for (;; ++j) {
    Ball term = exp(neg(mul(c, Ball::from_mpz((mpz_class(1) << j) - 1, p), p)), p);
    B3 = add(B3, term, p);
    Ball lr = neg(mul(c, Ball::from_mpz(mpz_class(1) << j, p), p));
    detail::Real term_hi = term.upper();
    if (j >= 2 && certainly_leq(lr, minus_ln2) &&
        mpfr_cmp(term_hi.get(), tiny.get()) <= 0)
      break;
    if (j > 300) throw precision_cap_error("B3 tail did not certify");
  }
  {
    Ball tail = mul_2si(
        exp(neg(mul(c, Ball::from_mpz((mpz_class(1) << (j + 1)) - 1, p), p)), p), 1);
    detail::Real tu(detail::kRadPrec);
    mpfr_set(tu.get(), tail.upper().get(), MPFR_RNDU);
    B3.add_rad(tu);
  }

  // B1: every g_k(x) = exp(2^k (x - 2^(eps k))) is increasing in x, so the
  // sup of the sum over [0, 100] is its value at x = 100.
  const mpq_class x(100);
  Ball B1 = Ball::exact_zero(p);
  long k = 1;
  for (;; ++k) {
    Ball e = detail::pow2_rational(eps * k, p);
    Ball g = exp(mul_2si(sub(Ball::from_rational(x, p), e, p), k), p);
    B1 = add(B1, g, p);
    // monotone-decreasing tail once 2^(eps k)(2^(1+eps)-1) >= x and the
    // ratio g_{k+1}/g_k = exp(2^k [x - 2^(eps k)(2^(1+eps)-1)]) <= 1/2
    Ball bracket = sub(Ball::from_rational(x, p), mul(e, denom, p), p);
    Ball lr = mul_2si(bracket, k);
    if (certainly_leq(lr, minus_ln2) && certainly_negative(bracket)) break;
    if (k > 400) throw precision_cap_error("B1 tail did not certify");
  }
  {
    Ball e = detail::pow2_rational(eps * (k + 1), p);
    Ball gnext = exp(mul_2si(sub(Ball::from_rational(x, p), e, p), k + 1), p);
    Ball tail = mul_2si(gnext, 1);
    detail::Real tu(detail::kRadPrec);
    mpfr_set(tu.get(), tail.upper().get(), MPFR_RNDU);
    B1.add_rad(tu);
  }

  Ball A2 = B2;  // construction: identical balls
  Ball A1 = ball_max(B1, add(Ball::from_si(2, p), B3, p), p);
  return {eps, B1, B2, B3, A1, A2};
}

struct EnvelopeCheckResult {
  bool passed = false;
  Ball max_ratio = Ball::exact_zero(Precision(64));
  long points = 0;
  mpq_class worst_x, worst_t;
  std::vector<std::pair<std::pair<mpq_class, mpq_class>, Ball>> rows;
};

namespace detail {

inline std::vector<mpq_class> linspace_q(const mpq_class& lo, const mpq_class& hi,
                                         long n) {
  std::vector<mpq_class> v;
  if (n <= 1) {
    v.push_back(lo);
    return v;
  }
  for (long i = 0; i < n; ++i)
    v.push_back(lo + (hi - lo) * mpq_class(i, n - 1));
  return v;
}

}  // namespace detail

/// max over the grid of |w_eps(x,t)| exp(-A2 |x|^(1+1/eps)), certified
/// pointwise; passes iff every ratio is certified <= A1.
inline EnvelopeCheckResult envelope_check(const mpq_class& eps,
                                          const EnvelopeCertificate& cert,
                                          const mpq_class& x_lo, const mpq_class& x_hi,
                                          long nx, const mpq_class& t_lo,
                                          const mpq_class& t_hi, long nt,
                                          Precision p, bool keep_rows = false) {
  std::vector<mpq_class> xs = detail::linspace_q(x_lo, x_hi, nx);
  std::vector<mpq_class> ts = detail::linspace_q(t_lo, t_hi, nt);

  EvalOptions opt;
  opt.target_rel = mpq_class(1, mpz_class(1) << 40);

  EnvelopeCheckResult out;
  out.max_ratio = Ball::exact_zero(p);
  detail::Real max_lo(p.bits), max_hi(p.bits);
  mpfr_set_zero(max_lo.get(), 1);
  mpfr_set_zero(max_hi.get(), 1);
  bool all_pass = true;

  Ball one_over_eps_plus1 = Ball::from_rational(1 + mpq_class(1) / eps, p);
  detail::Real a1_lo = cert.A1.lower();

  for (const mpq_class& x : xs) {
    // exp(-A2 |x|^(1+1/eps)); equal to 1 at x = 0
    Ball damp = Ball::from_si(1, p);
    if (x != 0) {
      mpq_class ax = x < 0 ? mpq_class(-x) : x;
      Ball pw = exp(mul(one_over_eps_plus1, log(Ball::from_rational(ax, p), p), p), p);
      damp = exp(neg(mul(cert.A2, pw, p)), p);
    }
    for (const mpq_class& t : ts) {
      EvalResult w = eval_weps(eps, ExactReal(x), ExactReal(t), opt);
      Ball ratio = mul(abs(w.value), damp, p);
      ++out.points;
      if (keep_rows) out.rows.push_back({{x, t}, ratio});
      detail::Real hi = ratio.upper();
      if (mpfr_cmp(hi.get(), max_hi.get()) > 0) {
        mpfr_set(max_hi.get(), hi.get(), MPFR_RNDU);
        detail::Real lo = ratio.lower();
        if (mpfr_sgn(lo.get()) < 0) mpfr_set_zero(lo.get(), 1);
        mpfr_set(max_lo.get(), lo.get(), MPFR_RNDD);
        out.worst_x = x;
        out.worst_t = t;
      }
      if (mpfr_cmp(hi.get(), a1_lo.get()) > 0) all_pass = false;
    }
  }
  out.max_ratio = Ball::from_endpoints(max_lo.get(), max_hi.get(), p);
  out.passed = all_pass;
  return out;
}

}  // namespace nwheat
