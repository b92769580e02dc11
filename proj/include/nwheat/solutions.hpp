#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "nwheat/ball.hpp"
#include "nwheat/exact_real.hpp"
#include "nwheat/heat_kernel.hpp"
#include "nwheat/rational_enum.hpp"

namespace nwheat {

enum class SolutionKind { U1, U2, WEPS };

inline const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::U1: return "u1";
    case SolutionKind::U2: return "u2";
    default: return "weps";
  }
}

/// Which solution is addressed. U1 and U2 live on x >= 0; WEPS on all of R
/// and carries its eps in (0,1). U2 values depend on the fixed rational
/// enumeration in rational_enum.hpp.
struct SolutionId {
  SolutionKind kind;
  mpq_class eps;  // WEPS only

  static SolutionId u1() { return {SolutionKind::U1, 0}; }
  static SolutionId u2() { return {SolutionKind::U2, 0}; }
  static SolutionId weps(mpq_class e) {
    if (e <= 0 || e >= 1) throw domain_error("eps must lie in (0,1)");
    return {SolutionKind::WEPS, std::move(e)};
  }

  void check_point(const ExactReal& x) const {
    if (kind != SolutionKind::WEPS && x.sign() < 0)
      throw domain_error(std::string(to_string(kind)) + " requires x >= 0");
  }
};

struct EvalResult {
  Ball value;             // tail bound already folded into the radius
  Ball series_enclosure;  // the truncated sum alone (rounding radius only)
  long terms_used;
  Ball tail_bound;
  bool target_met;
  long bits_used;
};

struct EvalOptions {
  mpq_class target_rad{mpq_class(1, 1000000)};  // overwritten below
  std::optional<mpq_class> target_rel;  // alternative: rad <= rel * |mid|
  long start_bits = 128;
  std::optional<long> forced_terms;   // pin the truncation index (tail tests)
  bool allow_extended_domain = false; // u1/weps series converge for x > -1/2

  EvalOptions() {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 10, 24);
    target_rad = mpq_class(1, d);
  }
};

namespace detail {

inline void check_u1_domain(const ExactReal& x, bool extended) {
  if (x.sign() >= 0) return;
  if (extended && x.is_rational() && x.rational() > mpq_class(-1, 2)) return;
  throw domain_error("u1 requires x >= 0");
}

// exp(-q) as a ball for exact rational q (kept exact until the final exp).
inline Ball exp_neg_rational(const mpq_class& q, Precision p) {
  return exp(Ball::from_rational(-q, p), p);
}

// 2^(a/b) as a ball; exact power of two when b | a.
inline Ball pow2_rational(const mpq_class& e, Precision p) {
  if (e.get_den() == 1) {
    long ex = mpz_get_si(e.get_num().get_mpz_t());
    return mul_2si(Ball::from_si(1, p), ex);
  }
  return exp(mul(Ball::from_rational(e, p), ln2_ball(p), p), p);
}

// Angle 2^(2k+1) t - 2^k x. Exact scalings keep the radius at the input's
// rounding level, which the caller's precision bump accounts for.
inline Ball trig_angle(long k, const Ball& xb, const Ball& tb, Precision p) {
  return sub(mul_2si(tb, 2 * k + 1), mul_2si(xb, k), p);
}

inline bool rad_leq_q(const Ball& b, const mpq_class& q) {
  Real t(kRadPrec);
  mpfr_set_q(t.get(), q.get_mpq_t(), MPFR_RNDD);
  return mpfr_cmp(b.rad(), t.get()) <= 0;
}

// log2 of a positive rational to within ~1, for truncation planning only
// (all actual bounds are certified afterwards in ball arithmetic).
inline double log2_approx(const mpq_class& q) {
  return static_cast<double>(mpz_sizeinbase(q.get_num().get_mpz_t(), 2)) -
         static_cast<double>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
}

}  // namespace detail

namespace detail {

inline bool meets_target(const Ball& value, const EvalOptions& opt) {
  if (rad_leq_q(value, opt.target_rad)) return true;
  if (!opt.target_rel) return false;
  if (value.is_exact_zero()) return true;
  Real bound(kRadPrec);
  mpfr_abs(bound.get(), value.mid(), MPFR_RNDD);
  mpfr_mul_q(bound.get(), bound.get(), opt.target_rel->get_mpq_t(), MPFR_RNDD);
  return mpfr_cmp(value.rad(), bound.get()) <= 0;
}

}  // namespace detail

/// u1(x,t) = sum_{k>=1} e^(-2^k (1+x)) sin(2^(2k+1) t - 2^k x), with a
/// certified geometric tail e^(-2^(K+1)(1+x)) / (1 - e^-2) after K terms
/// (denominator 1 - e^-1 on the extended strip -1/2 < x < 0).
inline EvalResult eval_u1(const ExactReal& x, const ExactReal& t,
                          const EvalOptions& opt = {}) {
  detail::check_u1_domain(x, opt.allow_extended_domain);
  const bool origin = x.is_zero() && t.is_zero();

  // Truncation planning: double-math estimate, certified below.
  double xd = x.is_rational() ? x.rational().get_d() : x.coef().get_d() * 1.5;
  double logt = -detail::log2_approx(opt.target_rad) * 0.6931471805599453;
  long K = 1;
  if (opt.forced_terms) {
    K = *opt.forced_terms;
  } else {
    while (K < 62 && std::exp2(K + 1) * (1.0 + xd) < logt + 4) ++K;
    ++K;
  }

  long bits = std::max(opt.start_bits, 2 * K + 96);
  while (true) {
    Precision p{bits};
    Ball xb = x.to_ball(p), tb = t.to_ball(p);
    Ball one_plus_x = add(Ball::from_si(1, p), xb, p);

    Ball acc = Ball::exact_zero(p);
    if (!origin) {
      for (long k = 1; k <= K; ++k) {
        Ball a = x.is_rational()
                     ? detail::exp_neg_rational((x.rational() + 1) << k, p)
                     : exp(neg(mul_2si(one_plus_x, k)), p);
        Ball s = sin(detail::trig_angle(k, xb, tb, p), p);
        acc = add(acc, mul(a, s, p), p);
      }
    }

    // tail <= a_{K+1} / (1 - r) with a per-step ratio bound r.
    Ball a_next = x.is_rational()
                      ? detail::exp_neg_rational((x.rational() + 1) << (K + 1), p)
                      : exp(neg(mul_2si(one_plus_x, K + 1)), p);
    long ratio_exp = (x.sign() >= 0) ? -2 : -1;
    Ball denom = sub(Ball::from_si(1, p), exp(Ball::from_si(ratio_exp, p), p), p);
    Ball tail = origin ? Ball::exact_zero(p) : div(a_next, denom, p);

    Ball value = acc;
    detail::Real tu = tail.upper();
    detail::Real tu32(detail::kRadPrec);
    mpfr_set(tu32.get(), tu.get(), MPFR_RNDU);
    value.add_rad(tu32);

    bool met = detail::meets_target(value, opt);
    if (met || bits >= precision_cap() ||
        (opt.forced_terms && !detail::rad_leq_q(tail, opt.target_rad)))
      return {value, acc, origin ? 0 : K, tail, met, bits};
    bits = std::min(bits * 2, precision_cap());
  }
}

/// u2(x,t) = sum_{k>=1} 2^-k Phi(x+1, t - r_k) over the fixed enumeration;
/// terms with t <= r_k are exactly zero; tail after K terms is
/// 2^-K sup_{s>0} Phi(x+1, s).
inline EvalResult eval_u2(const ExactReal& x, const ExactReal& t,
                          const EvalOptions& opt = {}) {
  if (x.sign() < 0 &&
      !(opt.allow_extended_domain && x.is_rational() &&
        x.rational() > mpq_class(-1, 2)))
    throw domain_error("u2 requires x >= 0");

  long bits = opt.start_bits;
  while (true) {
    Precision p{bits};
    Ball xb = x.to_ball(p);
    Ball yb = add(xb, Ball::from_si(1, p), p);
    Ball sup = mul(detail::g_envelope_sup(0, p),
                   div(Ball::from_si(1, p),
                       mul(sqrt(pi_ball(p), p), yb, p), p),
                   p);

    long K;
    if (opt.forced_terms) {
      K = *opt.forced_terms;
    } else {
      // tail halves per extra term: K ~ log2(sup / target) + margin
      double supd = mpfr_get_d(sup.upper().get(), MPFR_RNDU);
      K = std::max(4L, static_cast<long>(std::log2(std::max(supd, 1e-300)) -
                                         detail::log2_approx(opt.target_rad)) +
                           3);
    }

    Ball tb = t.to_ball(p);
    Ball acc = Ball::exact_zero(p);
    for (long k = 1; k <= K; ++k) {
      mpq_class rk = enumerate_rational(static_cast<unsigned long>(k));
      if (t.is_rational()) {
        if (t.rational() <= rk) continue;  // exact zero term
        Ball ph = phi(yb, Ball::from_rational(t.rational() - rk, p), p);
        acc = add(acc, mul_2si(ph, -k), p);
      } else {
        Ball dt = sub(tb, Ball::from_rational(rk, p), p);
        Ball ph = phi(yb, dt, p);  // straddle handled inside phi
        acc = add(acc, mul_2si(ph, -k), p);
      }
    }

    Ball tail = mul_2si(sup, -K);
    Ball value = acc;
    detail::Real tu = tail.upper();
    detail::Real tu32(detail::kRadPrec);
    mpfr_set(tu32.get(), tu.get(), MPFR_RNDU);
    value.add_rad(tu32);

    bool met = detail::meets_target(value, opt);
    if (met || bits >= precision_cap() ||
        (opt.forced_terms && !detail::rad_leq_q(tail, opt.target_rad)))
      return {value, acc, K, tail, met, bits};
    bits = std::min(bits * 2, precision_cap());
  }
}

/// w_eps(x,t) = sum_{k>=1} exp(-2^k (2^(eps k) + x)) sin(2^(2k+1) t - 2^k x).
/// For x < 0 the terms grow until the crossover k* (smallest k with
/// 2^(eps k) >= |x| + 1); the truncation index is forced past it, after
/// which the term ratio is at most e^-2 and the tail is geometric.
inline EvalResult eval_weps(const mpq_class& eps, const ExactReal& x,
                            const ExactReal& t, const EvalOptions& opt = {}) {
  if (eps <= 0 || eps >= 1) throw domain_error("eps must lie in (0,1)");
  if (!x.is_rational())
    throw domain_error("w_eps evaluation expects rational x");
  const mpq_class& xq = x.rational();
  const bool origin = x.is_zero() && t.is_zero();

  // Crossover: smallest k with 2^(eps k) >= |x| + 1.
  mpq_class ax1 = ::abs(xq) + 1;
  long kstar = 1;
  if (ax1 > 1) {
    Precision p{256};
    Ball bound = Ball::from_rational(ax1, p);
    for (long k = 1;; ++k) {
      mpq_class ek = eps * k;
      if (ek.get_den() == 1) {  // 2^(eps k) is an exact integer
        mpq_class pow2(mpz_class(1) << mpz_get_ui(ek.get_num().get_mpz_t()));
        if (pow2 >= ax1) {
          kstar = k;
          break;
        }
      } else {
        Ball v = detail::pow2_rational(ek, p);
        if (certainly_leq(bound, v)) {
          kstar = k;
          break;
        }
        if (!certainly_less(v, bound))
          throw undecidable_error("crossover comparison undecidable");
      }
      if (k > 4000) throw undecidable_error("crossover search runaway");
    }
  }

  double logt = -detail::log2_approx(opt.target_rad) * 0.6931471805599453;
  long K;
  if (opt.forced_terms) {
    K = std::max(*opt.forced_terms, kstar);
  } else {
    K = kstar;
    double xd = xq.get_d();
    while (K < 62 &&
           std::exp2(K + 1) * (std::exp2(eps.get_d() * (K + 1)) + xd) < logt + 4)
      ++K;
    ++K;
    if (K < kstar) K = kstar;
  }

  long bits = std::max(opt.start_bits, 2 * K + 96);
  while (true) {
    Precision p{bits};
    Ball xb = x.to_ball(p), tb = t.to_ball(p);

    auto weight = [&](long k) {
      // exp(-(2^((1+eps)k) + 2^k x))
      mpq_class e1 = (eps + 1) * k;
      Ball w = detail::pow2_rational(e1, p);
      Ball x_term = Ball::from_rational(xq * (mpz_class(1) << k), p);
      return exp(neg(add(w, x_term, p)), p);
    };

    Ball acc = Ball::exact_zero(p);
    if (!origin) {
      for (long k = 1; k <= K; ++k) {
        Ball s = sin(detail::trig_angle(k, xb, tb, p), p);
        acc = add(acc, mul(weight(k), s, p), p);
      }
    }

    Ball a_next = weight(K + 1);
    Ball denom = sub(Ball::from_si(1, p), exp(Ball::from_si(-2, p), p), p);
    Ball tail = origin ? Ball::exact_zero(p) : div(a_next, denom, p);

    Ball value = acc;
    detail::Real tu = tail.upper();
    detail::Real tu32(detail::kRadPrec);
    mpfr_set(tu32.get(), tu.get(), MPFR_RNDU);
    value.add_rad(tu32);

    bool met = detail::meets_target(value, opt);
    if (met || bits >= precision_cap() ||
        (opt.forced_terms && !detail::rad_leq_q(tail, opt.target_rad)))
      return {value, acc, origin ? 0 : K, tail, met, bits};
    bits = std::min(bits * 2, precision_cap());
  }
}

/// Dispatch by SolutionId.
inline EvalResult eval_solution(const SolutionId& id, const ExactReal& x,
                                const ExactReal& t, const EvalOptions& opt = {}) {
  switch (id.kind) {
    case SolutionKind::U1: return eval_u1(x, t, opt);
    case SolutionKind::U2: return eval_u2(x, t, opt);
    default: return eval_weps(id.eps, x, t, opt);
  }
}

}  // namespace nwheat
