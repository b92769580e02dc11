#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include "nwheat/signed_log.hpp"
#include "nwheat/solutions.hpp"

namespace nwheat {

/// n-th time derivative of a solution at a point, with a certified
/// truncation tail (folded into the value's radius) and a SignedLog view.
/// indeterminate = the sign could not be certified at the precision cap.
struct TimeDerivative {
  SolutionId solution;
  long order = 0;
  ExactReal x0, t0;
  SignedLog value_log;
  Ball value;
  bool indeterminate = false;
  long terms_used = 0;
  Ball tail_bound;
  /// Uniform-in-t bound: sum of weight magnitudes plus tail (|trig| <= 1).
  Ball weight_sum_bound;
  long bits_used = 0;
};

struct DerivOptions {
  mpq_class rel_tail{1, 100};  // tail_bound <= rel_tail * |value| when nonzero
  long start_bits = 128;
  long extra_terms = 2;        // past the certified ratio-1/2 point
};

namespace detail {

// Shared engine for the two lacunary trigonometric series. The n-th time
// derivative of sum_k a_k sin(2^(2k+1) t - 2^k x) is
//   sum_k a_k 2^(n(2k+1)) sin(theta_k + n pi/2),
// truncated once the term ratio  2^(2n) a_{k+1}/a_k  is certified <= 1/2 for
// three consecutive k (it is monotone beyond kmin), with geometric tail
// 2 * w_{K+1}.
struct TrigSeries {
  std::function<Ball(long, Precision)> log_weight;        // ln a_k
  std::function<Ball(long, Precision)> delta_log_weight;  // ln a_{k+1} - ln a_k
  long kmin = 1;
};

inline TimeDerivative trig_series_derivative(const SolutionId& id, long n,
                                             const ExactReal& x0,
                                             const ExactReal& t0,
                                             const TrigSeries& series,
                                             const DerivOptions& opt) {
  if (n < 0) throw domain_error("derivative order must be nonnegative");

  // Parity shortcut: at the origin every sine term is exactly zero.
  const bool exact_zero = x0.is_zero() && t0.is_zero() && n % 2 == 0;

  // Rough size of K (certified in the loop): ratio <= 1/2 once
  // 2^k (1+x0)-ish exceeds 2n ln2.
  long k_guess = 2;
  while (k_guess < 60 && std::exp2(k_guess) < 2.0 * static_cast<double>(n) + 8)
    ++k_guess;
  long bits = std::max(opt.start_bits, 2 * k_guess + 128);

  while (true) {
    Precision p{bits};
    Ball xb = x0.to_ball(p), tb = t0.to_ball(p);
    Ball minus_ln2 = neg(ln2_ball(p));
    Ball two_n_ln2 = mul(Ball::from_si(2 * n, p), ln2_ball(p), p);

    Ball acc = Ball::exact_zero(p);
    Ball wsum = Ball::exact_zero(p);
    long consecutive = 0, K = 0, extra = 0;
    bool ratio_certified = true;
    for (long k = 1;; ++k) {
      Ball w = mul_2si(exp(series.log_weight(k, p), p), n * (2 * k + 1));
      wsum = add(wsum, abs(w), p);
      if (!exact_zero) {
        Ball theta = detail::trig_angle(k, xb, tb, p);
        Ball trig = (n % 2 == 0) ? sin(theta, p) : cos(theta, p);
        if (n % 4 >= 2) trig = neg(trig);
        acc = add(acc, mul(w, trig, p), p);
      }
      K = k;
      if (k >= series.kmin) {
        Ball lr = add(two_n_ln2, series.delta_log_weight(k, p), p);
        if (certainly_leq(lr, minus_ln2))
          ++consecutive;
        else if (certainly_positive(sub(lr, minus_ln2, p)))
          consecutive = 0;
        else {
          ratio_certified = false;  // undecidable ratio at this precision
          break;
        }
      }
      if (consecutive >= 3) {
        if (extra >= opt.extra_terms) break;
        ++extra;
      }
      if (k > 200) throw precision_cap_error("trig series truncation runaway");
    }

    if (!ratio_certified) {
      if (bits >= precision_cap())
        throw precision_cap_error("term ratio undecidable at precision cap");
      bits = std::min(bits * 2, precision_cap());
      continue;
    }

    Ball w_next = mul_2si(exp(series.log_weight(K + 1, p), p), n * (2 * K + 3));
    Ball wtail = mul_2si(abs(w_next), 1);
    Ball tail = exact_zero ? Ball::exact_zero(p) : wtail;

    Ball value = acc;
    detail::Real tu(detail::kRadPrec);
    mpfr_set(tu.get(), tail.upper().get(), MPFR_RNDU);
    value.add_rad(tu);
    Ball wbound = add(wsum, wtail, p);

    TimeDerivative out{id,   n,     x0,    t0, SignedLog::zero(p), value,
                       false, K,    tail,  wbound, bits};
    if (exact_zero) {
      out.value = Ball::exact_zero(p);
      out.terms_used = 0;
      return out;
    }

    auto sl = try_signed_log_from_ball(value, p);
    bool tail_small = true;
    if (sl && sl->sign != 0) {
      // tail <= rel_tail * |value| (certified against the abs lower bound)
      Real bound(kRadPrec);
      mpfr_set(bound.get(), value.abs_lower().get(), MPFR_RNDD);
      mpfr_mul_q(bound.get(), bound.get(), opt.rel_tail.get_mpq_t(), MPFR_RNDD);
      Real tub(kRadPrec);
      mpfr_set(tub.get(), tail.upper().get(), MPFR_RNDU);
      tail_small = mpfr_cmp(tub.get(), bound.get()) <= 0;
    }
    if (sl && tail_small) {
      out.value_log = *sl;
      return out;
    }
    if (bits >= precision_cap()) {
      out.indeterminate = !sl.has_value();
      if (sl) out.value_log = *sl;
      return out;
    }
    bits = std::min(bits * 2, precision_cap());
  }
}

inline TrigSeries u1_series(const ExactReal& x0) {
  TrigSeries s;
  if (x0.is_rational()) {
    mpq_class xq = x0.rational();
    s.log_weight = [xq](long k, Precision p) {
      return Ball::from_rational(-((xq + 1) << k), p);
    };
    s.delta_log_weight = [xq](long k, Precision p) {
      return Ball::from_rational(-((xq + 1) << k), p);
    };
  } else {
    s.log_weight = [x0](long k, Precision p) {
      return neg(mul_2si(add(Ball::from_si(1, p), x0.to_ball(p), p), k));
    };
    s.delta_log_weight = s.log_weight;
  }
  return s;
}

inline TrigSeries weps_series(const mpq_class& eps, const mpq_class& x0,
                              long kmin) {
  TrigSeries s;
  s.kmin = kmin;
  s.log_weight = [eps, x0](long k, Precision p) {
    Ball w = detail::pow2_rational((eps + 1) * k, p);
    return neg(add(w, Ball::from_rational(x0 * (mpz_class(1) << k), p), p));
  };
  // ln a_{k+1} - ln a_k = -(2^((1+eps)k)(2^(1+eps) - 1) + 2^k x0)
  s.delta_log_weight = [eps, x0](long k, Precision p) {
    Ball base = detail::pow2_rational((eps + 1) * k, p);
    Ball factor = sub(detail::pow2_rational(eps + 1, p), Ball::from_si(1, p), p);
    Ball xterm = Ball::from_rational(x0 * (mpz_class(1) << k), p);
    return neg(add(mul(base, factor, p), xterm, p));
  };
  return s;
}

}  // namespace detail

/// d^n/dt^n u1(x0, t) at t0, in closed form with certified truncation.
inline TimeDerivative u1_time_derivative(long n, const ExactReal& x0,
                                         const ExactReal& t0,
                                         const DerivOptions& opt = {}) {
  if (x0.sign() < 0) throw domain_error("u1 requires x0 >= 0");
  return detail::trig_series_derivative(SolutionId::u1(), n, x0, t0,
                                        detail::u1_series(x0), opt);
}

/// Same engine with the w_eps weights.
inline TimeDerivative weps_time_derivative(long n, const mpq_class& eps,
                                           const ExactReal& x0,
                                           const ExactReal& t0,
                                           const DerivOptions& opt = {}) {
  if (eps <= 0 || eps >= 1) throw domain_error("eps must lie in (0,1)");
  if (!x0.is_rational()) throw domain_error("w_eps derivative expects rational x0");
  const mpq_class& xq = x0.rational();
  // Ratio monotonicity (and the geometric tail) is valid once
  // 2^(eps k) >= |x0| + 1; reuse the evaluator's crossover logic.
  long kmin = 1;
  {
    mpq_class ax1 = ::abs(xq) + 1;
    if (ax1 > 1) {
      Precision p{256};
      Ball bound = Ball::from_rational(ax1, p);
      for (long k = 1;; ++k) {
        mpq_class ek = eps * k;
        bool ok;
        if (ek.get_den() == 1) {
          ok = mpq_class(mpz_class(1) << mpz_get_ui(ek.get_num().get_mpz_t())) >= ax1;
        } else {
          Ball v = detail::pow2_rational(ek, p);
          if (certainly_leq(bound, v)) ok = true;
          else if (certainly_less(v, bound)) ok = false;
          else throw undecidable_error("crossover comparison undecidable");
        }
        if (ok) { kmin = k; break; }
        if (k > 4000) throw undecidable_error("crossover search runaway");
      }
    }
  }
  return detail::trig_series_derivative(SolutionId::weps(eps), n, x0, t0,
                                        detail::weps_series(eps, xq, kmin), opt);
}

/// d^n/dt^n u2(x0, t) at t0: sum_k 2^-k phi_dt(n, x0+1, t0-r_k) over retained
/// shifts, tail 2^-K sup_s |phi_dt(n, x0+1, s)|. Orders above 60 are outside
/// the certified range.
inline TimeDerivative u2_time_derivative(long n, const ExactReal& x0,
                                         const ExactReal& t0,
                                         const DerivOptions& opt = {}) {
  if (n < 0 || n > 60) throw domain_error("u2 derivative order must be in [0, 60]");
  if (x0.sign() < 0) throw domain_error("u2 requires x0 >= 0");
  if (!x0.is_rational() || !t0.is_rational())
    throw domain_error("u2 derivative expects rational x0, t0");
  const mpq_class xq = x0.rational(), tq = t0.rational();
  const mpq_class y = xq + 1;

  long bits = opt.start_bits;
  long K = 40;
  while (true) {
    Precision p{bits};
    Ball sup = kernel_dx_sup(2 * n, ExactReal(y), p);
    Ball yb = Ball::from_rational(y, p);

    Ball acc = Ball::exact_zero(p);
    for (long k = 1; k <= K; ++k) {
      mpq_class rk = enumerate_rational(static_cast<unsigned long>(k));
      if (tq <= rk) continue;  // exact zero term
      Ball d = phi_dx(2 * n, yb, Ball::from_rational(tq - rk, p), p);
      acc = add(acc, mul_2si(d, -k), p);
    }
    Ball tail = mul_2si(sup, -K);

    Ball value = acc;
    detail::Real tu(detail::kRadPrec);
    mpfr_set(tu.get(), tail.upper().get(), MPFR_RNDU);
    value.add_rad(tu);

    TimeDerivative out{SolutionId::u2(), n,    x0,   t0,
                       SignedLog::zero(p),     value, false,
                       K,   tail, sup, bits};
    auto sl = try_signed_log_from_ball(value, p);
    bool tail_small = true;
    if (sl && sl->sign != 0) {
      detail::Real bound(detail::kRadPrec);
      mpfr_set(bound.get(), value.abs_lower().get(), MPFR_RNDD);
      mpfr_mul_q(bound.get(), bound.get(), opt.rel_tail.get_mpq_t(), MPFR_RNDD);
      tail_small = mpfr_cmp(tu.get(), bound.get()) <= 0;
    }
    if (sl && tail_small) {
      out.value_log = *sl;
      return out;
    }
    if (bits >= precision_cap() && K >= 4000) {
      out.indeterminate = !sl.has_value();
      if (sl) out.value_log = *sl;
      return out;
    }
    if (!tail_small && K < 4000) K += 20;
    if (bits < precision_cap()) bits = std::min(bits * 2, precision_cap());
  }
}

inline TimeDerivative time_derivative(const SolutionId& id, long n,
                                      const ExactReal& x0, const ExactReal& t0,
                                      const DerivOptions& opt = {}) {
  switch (id.kind) {
    case SolutionKind::U1: return u1_time_derivative(n, x0, t0, opt);
    case SolutionKind::U2: return u2_time_derivative(n, x0, t0, opt);
    default: return weps_time_derivative(n, id.eps, x0, t0, opt);
  }
}

// ---------------------------------------------------------------------------
// ln n! by exact summation of logs (the certification stays elementary;
// Stirling is only a test oracle). Capped at n = 10^6.
// ---------------------------------------------------------------------------

class LnFactorial {
 public:
  explicit LnFactorial(Precision p) : acc_(Ball::exact_zero(p)), p_(p) {}

  /// ln(n!) with ascending reuse: advancing from the previous n costs only
  /// the new terms.
  const Ball& advance_to(long n) {
    if (n < 0 || n > 1000000)
      throw domain_error("ln n! supported for 0 <= n <= 10^6");
    if (n < cur_) {
      cur_ = 1;
      acc_ = Ball::exact_zero(p_);
    }
    for (long i = cur_ + 1; i <= n; ++i)
      acc_ = add(acc_, log(Ball::from_si(i, p_), p_), p_);
    cur_ = std::max(cur_, n);
    return acc_;
  }

 private:
  Ball acc_;
  Precision p_;
  long cur_ = 1;
};

inline Ball ln_factorial(long n, Precision p) {
  LnFactorial f(p);
  return f.advance_to(n);
}

/// (|h^(n)(t0)| / n!)^(1/n) as a SignedLog:
/// (1/n) (ln|h^(n)| - ln n!). Zero derivative gives the zero SignedLog;
/// an indeterminate derivative is an absent data point (nullopt).
inline std::optional<SignedLog> taylor_coefficient(const SolutionId& id, long n,
                                                   const ExactReal& x0,
                                                   const ExactReal& t0,
                                                   const DerivOptions& opt = {}) {
  if (n < 1) throw domain_error("taylor_coefficient needs n >= 1");
  TimeDerivative d = time_derivative(id, n, x0, t0, opt);
  if (d.indeterminate) return std::nullopt;
  if (d.value_log.is_zero()) return SignedLog::zero(Precision(d.bits_used));
  Precision p{d.bits_used};
  Ball root = div(sub(d.value_log.logmag, ln_factorial(n, p), p),
                  Ball::from_si(n, p), p);
  return SignedLog(1, root);
}

}  // namespace nwheat
