#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "nwheat/numeric_env.hpp"
#include "nwheat/real.hpp"

namespace nwheat {

namespace detail {

// Radii live at a fixed small precision and are always rounded upward, so
// every radius operation preserves containment.
inline constexpr long kRadPrec = 32;

// Upper bound on the rounding error of a correctly rounded midpoint: one ulp
// of the result (generous; 0.5 ulp would do, the slack keeps low-precision
// reference values inside the ball). Zero when the ternary flag says exact.
inline Real rnd_error(mpfr_srcptr mid, int ternary) {
  Real r(kRadPrec);
  if (ternary == 0) return r;
  if (mpfr_zero_p(mid)) {
    // Result underflowed to zero; the true value is below the smallest
    // representable magnitude.
    mpfr_set_ui_2exp(r.get(), 1, mpfr_get_emin(), MPFR_RNDU);
  } else {
    mpfr_set_ui_2exp(r.get(), 1, mpfr_get_exp(mid) - mpfr_get_prec(mid),
                     MPFR_RNDU);
  }
  return r;
}

inline Real abs_up(mpfr_srcptr x) {
  Real r(kRadPrec);
  mpfr_abs(r.get(), x, MPFR_RNDU);
  return r;
}

}  // namespace detail

/// Midpoint-radius enclosure of a real number. The represented value is
/// guaranteed to lie in [mid - rad, mid + rad]; every operation folds its
/// rounding error into the radius. Immutable after construction.
class Ball {
 public:
  explicit Ball(Precision p) : mid_(p.bits), rad_(detail::kRadPrec) {}

  static Ball exact_zero(Precision p) { return Ball(p); }

  static Ball from_si(long v, Precision p) {
    Ball b(p);
    int t = mpfr_set_si(b.mid_.get(), v, MPFR_RNDN);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  static Ball from_mpz(const mpz_class& v, Precision p) {
    Ball b(p);
    int t = mpfr_set_z(b.mid_.get(), v.get_mpz_t(), MPFR_RNDN);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  static Ball from_rational(const mpq_class& v, Precision p) {
    Ball b(p);
    int t = mpfr_set_q(b.mid_.get(), v.get_mpq_t(), MPFR_RNDN);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  static Ball from_double(double v, Precision p) {
    Ball b(p);
    int t = mpfr_set_d(b.mid_.get(), v, MPFR_RNDN);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  /// Exact point ball carrying the given midpoint (no rounding: the target
  /// precision must be at least the source's).
  static Ball point(mpfr_srcptr m, Precision p) {
    Ball b(p);
    int t = mpfr_set(b.mid_.get(), m, MPFR_RNDN);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  /// Enclosure of the interval [lo, hi].
  static Ball from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, Precision p) {
    Ball b(p);
    int t = mpfr_add(b.mid_.get(), lo, hi, MPFR_RNDN);
    t = mpfr_div_2si(b.mid_.get(), b.mid_.get(), 1, MPFR_RNDN) || t;
    detail::Real d1(detail::kRadPrec), d2(detail::kRadPrec);
    mpfr_sub(d1.get(), hi, b.mid_.get(), MPFR_RNDU);
    mpfr_sub(d2.get(), b.mid_.get(), lo, MPFR_RNDU);
    if (mpfr_cmp(d1.get(), d2.get()) < 0) mpfr_swap(d1.get(), d2.get());
    b.add_rad(d1);
    b.add_rad(detail::rnd_error(b.mid_.get(), t));
    return b;
  }

  mpfr_srcptr mid() const { return mid_.get(); }
  mpfr_srcptr rad() const { return rad_.get(); }
  Precision precision() const { return Precision(mid_.prec()); }

  bool is_exact_zero() const {
    return mpfr_zero_p(mid_.get()) && mpfr_zero_p(rad_.get());
  }
  bool is_exact() const { return mpfr_zero_p(rad_.get()); }

  bool contains_zero() const {
    return mpfr_cmpabs(mid_.get(), rad_.get()) <= 0;
  }

  /// +1 if the whole ball is positive, -1 if negative, 0 if it is the exact
  /// zero; throws undecidable_error when the ball straddles zero.
  int certified_sign() const {
    if (is_exact_zero()) return 0;
    if (!contains_zero()) return mpfr_sgn(mid_.get());
    throw undecidable_error("ball straddles zero; sign not certified");
  }

  detail::Real lower() const {
    detail::Real r(mid_.prec());
    mpfr_sub(r.get(), mid_.get(), rad_.get(), MPFR_RNDD);
    return r;
  }

  detail::Real upper() const {
    detail::Real r(mid_.prec());
    mpfr_add(r.get(), mid_.get(), rad_.get(), MPFR_RNDU);
    return r;
  }

  /// Lower bound of |value| over the ball (zero if the ball touches zero).
  detail::Real abs_lower() const {
    detail::Real r(mid_.prec());
    if (contains_zero()) {
      mpfr_set_zero(r.get(), 1);
      return r;
    }
    mpfr_abs(r.get(), mid_.get(), MPFR_RNDD);
    mpfr_sub(r.get(), r.get(), rad_.get(), MPFR_RNDD);
    return r;
  }

  /// Upper bound of |value| over the ball.
  detail::Real abs_upper() const {
    detail::Real r(mid_.prec());
    mpfr_abs(r.get(), mid_.get(), MPFR_RNDU);
    mpfr_add(r.get(), r.get(), rad_.get(), MPFR_RNDU);
    return r;
  }

  double mid_double() const { return mpfr_get_d(mid_.get(), MPFR_RNDN); }

  /// True if this ball's interval contains the other's entirely.
  bool contains_ball(const Ball& inner) const {
    detail::Real lo = lower(), hi = upper();
    detail::Real ilo = inner.lower(), ihi = inner.upper();
    return mpfr_cmp(lo.get(), ilo.get()) <= 0 &&
           mpfr_cmp(ihi.get(), hi.get()) <= 0;
  }

  bool contains_value(mpfr_srcptr v) const {
    detail::Real lo = lower(), hi = upper();
    return mpfr_cmp(lo.get(), v) <= 0 && mpfr_cmp(v, hi.get()) <= 0;
  }

  /// This ball inflated by its own radius (used by the precision-nesting
  /// property: the 2p-bit result must land inside the p-bit result inflated).
  Ball inflated() const {
    Ball b = *this;
    mpfr_mul_2si(b.rad_.get(), b.rad_.get(), 1, MPFR_RNDU);
    return b;
  }

  void validate() const {
    if (!mpfr_number_p(mid_.get()) || !mpfr_number_p(rad_.get()) ||
        mpfr_sgn(rad_.get()) < 0)
      throw precision_cap_error(
          "ball overflowed the extended exponent range or lost finiteness");
  }

  // Internal: mutation helpers for the arithmetic layer.
  mpfr_ptr mid_rw() { return mid_.get(); }
  mpfr_ptr rad_rw() { return rad_.get(); }
  void add_rad(const detail::Real& e) {
    mpfr_add(rad_.get(), rad_.get(), e.get(), MPFR_RNDU);
  }

 private:
  detail::Real mid_;
  detail::Real rad_;
};

// ---------------------------------------------------------------------------
// Arithmetic. Every function returns a ball containing the exact image of
// every point of its input balls.
// ---------------------------------------------------------------------------

inline Ball add(const Ball& a, const Ball& b, Precision p) {
  Ball r(p);
  int t = mpfr_add(r.mid_rw(), a.mid(), b.mid(), MPFR_RNDN);
  r.add_rad(detail::abs_up(a.rad()));
  r.add_rad(detail::abs_up(b.rad()));
  r.add_rad(detail::rnd_error(r.mid(), t));
  r.validate();
  return r;
}

inline Ball sub(const Ball& a, const Ball& b, Precision p) {
  Ball r(p);
  int t = mpfr_sub(r.mid_rw(), a.mid(), b.mid(), MPFR_RNDN);
  r.add_rad(detail::abs_up(a.rad()));
  r.add_rad(detail::abs_up(b.rad()));
  r.add_rad(detail::rnd_error(r.mid(), t));
  r.validate();
  return r;
}

inline Ball neg(const Ball& a) {
  Ball r = a;
  mpfr_neg(r.mid_rw(), r.mid_rw(), MPFR_RNDN);  // exact
  return r;
}

inline Ball abs(const Ball& a) {
  Ball r = a;
  mpfr_abs(r.mid_rw(), r.mid_rw(), MPFR_RNDN);  // exact
  return r;
}

inline Ball mul(const Ball& a, const Ball& b, Precision p) {
  Ball r(p);
  int t = mpfr_mul(r.mid_rw(), a.mid(), b.mid(), MPFR_RNDN);
  // |ab - ma*mb| <= ra*(|mb| + rb) + |ma|*rb
  detail::Real e(detail::kRadPrec);
  mpfr_abs(e.get(), b.mid(), MPFR_RNDU);
  mpfr_add(e.get(), e.get(), b.rad(), MPFR_RNDU);
  mpfr_mul(e.get(), e.get(), a.rad(), MPFR_RNDU);
  r.add_rad(e);
  detail::Real e2(detail::kRadPrec);
  mpfr_abs(e2.get(), a.mid(), MPFR_RNDU);
  mpfr_mul(e2.get(), e2.get(), b.rad(), MPFR_RNDU);
  r.add_rad(e2);
  r.add_rad(detail::rnd_error(r.mid(), t));
  r.validate();
  return r;
}

/// Exact scaling by 2^e (no rounding on either midpoint or radius).
inline Ball mul_2si(const Ball& a, long e) {
  Ball r = a;
  mpfr_mul_2si(r.mid_rw(), r.mid_rw(), e, MPFR_RNDN);
  mpfr_mul_2si(r.rad_rw(), r.rad_rw(), e, MPFR_RNDU);
  r.validate();
  return r;
}

inline Ball div(const Ball& a, const Ball& b, Precision p) {
  // Denominator must exclude zero over the whole ball.
  detail::Real babs(b.precision().bits);
  mpfr_abs(babs.get(), b.mid(), MPFR_RNDD);
  mpfr_sub(babs.get(), babs.get(), b.rad(), MPFR_RNDD);
  if (mpfr_sgn(babs.get()) <= 0)
    throw domain_error("division by a ball containing zero");

  Ball r(p);
  int t = mpfr_div(r.mid_rw(), a.mid(), b.mid(), MPFR_RNDN);
  // |a/b - ma/mb| <= (ra + |ma/mb| * rb) / (|mb| - rb)
  detail::Real num(detail::kRadPrec);
  mpfr_abs(num.get(), r.mid(), MPFR_RNDU);
  mpfr_mul(num.get(), num.get(), b.rad(), MPFR_RNDU);
  mpfr_add(num.get(), num.get(), a.rad(), MPFR_RNDU);
  detail::Real den(detail::kRadPrec);
  mpfr_set(den.get(), babs.get(), MPFR_RNDD);
  detail::Real e(detail::kRadPrec);
  mpfr_div(e.get(), num.get(), den.get(), MPFR_RNDU);
  r.add_rad(e);
  r.add_rad(detail::rnd_error(r.mid(), t));
  r.validate();
  return r;
}

namespace detail {

// Monotone functions get endpoint evaluation: image of [m-ra, m+ra] is
// [f(lo), f(hi)] (or reversed), so three directed evaluations give a tight
// rigorous radius.
template <typename F>
Ball monotone_unary(F&& f, const Ball& a, Precision p) {
  Ball r(p);
  int t = f(r.mid_rw(), a.mid(), MPFR_RNDN);
  if (mpfr_zero_p(a.rad())) {
    r.add_rad(rnd_error(r.mid(), t));
    r.validate();
    return r;
  }
  Real hi_in(a.precision().bits), lo_in(a.precision().bits);
  mpfr_add(hi_in.get(), a.mid(), a.rad(), MPFR_RNDU);
  mpfr_sub(lo_in.get(), a.mid(), a.rad(), MPFR_RNDD);
  Real fhi(p.bits), flo(p.bits);
  f(fhi.get(), hi_in.get(), MPFR_RNDU);
  f(flo.get(), lo_in.get(), MPFR_RNDD);
  Real d1(kRadPrec), d2(kRadPrec);
  mpfr_sub(d1.get(), fhi.get(), r.mid(), MPFR_RNDU);
  mpfr_sub(d2.get(), r.mid(), flo.get(), MPFR_RNDU);
  if (mpfr_cmp(d1.get(), d2.get()) < 0) mpfr_swap(d1.get(), d2.get());
  r.add_rad(d1);
  r.add_rad(rnd_error(r.mid(), t));
  r.validate();
  return r;
}

}  // namespace detail

inline Ball exp(const Ball& a, Precision p) {
  return detail::monotone_unary(
      [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t rn) { return mpfr_exp(o, i, rn); },
      a, p);
}

inline Ball log(const Ball& a, Precision p) {
  detail::Real lo = a.lower();
  if (mpfr_sgn(lo.get()) <= 0)
    throw domain_error("log of a ball touching zero or below");
  return detail::monotone_unary(
      [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t rn) { return mpfr_log(o, i, rn); },
      a, p);
}

inline Ball sqrt(const Ball& a, Precision p) {
  if (a.is_exact_zero()) return Ball::exact_zero(p);
  detail::Real lo = a.lower();
  if (mpfr_sgn(lo.get()) < 0)
    throw domain_error("sqrt of a ball containing negative values");
  return detail::monotone_unary(
      [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t rn) { return mpfr_sqrt(o, i, rn); },
      a, p);
}

namespace detail {

// sin/cos are 1-Lipschitz, so input radius passes straight through. A ball
// wider than the function's range collapses to the trivial enclosure [-1, 1].
template <typename F>
Ball lipschitz_trig(F&& f, const Ball& a, Precision p) {
  if (mpfr_cmp_ui(a.rad(), 2) >= 0) {
    Ball r(p);
    mpfr_set_ui(r.rad_rw(), 1, MPFR_RNDU);
    return r;
  }
  Ball r(p);
  int t = f(r.mid_rw(), a.mid(), MPFR_RNDN);
  r.add_rad(abs_up(a.rad()));
  r.add_rad(rnd_error(r.mid(), t));
  r.validate();
  return r;
}

}  // namespace detail

inline Ball sin(const Ball& a, Precision p) {
  return detail::lipschitz_trig(
      [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t rn) { return mpfr_sin(o, i, rn); },
      a, p);
}

inline Ball cos(const Ball& a, Precision p) {
  return detail::lipschitz_trig(
      [](mpfr_ptr o, mpfr_srcptr i, mpfr_rnd_t rn) { return mpfr_cos(o, i, rn); },
      a, p);
}

inline Ball pow_int(const Ball& a, long n, Precision p) {
  if (n == 0) return Ball::from_si(1, p);
  if (n < 0) return div(Ball::from_si(1, p), pow_int(a, -n, p), p);
  // Binary exponentiation with ball multiplication.
  Ball base = a;
  Ball acc = Ball::from_si(1, p);
  bool acc_is_one = true;
  unsigned long e = static_cast<unsigned long>(n);
  while (e > 0) {
    if (e & 1UL) {
      acc = acc_is_one ? base : mul(acc, base, p);
      acc_is_one = false;
    }
    e >>= 1UL;
    if (e > 0) base = mul(base, base, p);
  }
  return acc;
}

/// Enclosure of max(a, b) as intervals.
inline Ball ball_max(const Ball& a, const Ball& b, Precision p) {
  detail::Real alo = a.lower(), ahi = a.upper();
  detail::Real blo = b.lower(), bhi = b.upper();
  mpfr_srcptr lo = mpfr_cmp(alo.get(), blo.get()) >= 0 ? alo.get() : blo.get();
  mpfr_srcptr hi = mpfr_cmp(ahi.get(), bhi.get()) >= 0 ? ahi.get() : bhi.get();
  return Ball::from_endpoints(lo, hi, p);
}

// Certified comparisons: true only when the separation holds for every pair
// of points in the two balls.
inline bool certainly_less(const Ball& a, const Ball& b) {
  detail::Real ahi = a.upper(), blo = b.lower();
  return mpfr_cmp(ahi.get(), blo.get()) < 0;
}
inline bool certainly_leq(const Ball& a, const Ball& b) {
  detail::Real ahi = a.upper(), blo = b.lower();
  return mpfr_cmp(ahi.get(), blo.get()) <= 0;
}
inline bool certainly_positive(const Ball& a) {
  detail::Real lo = a.lower();
  return mpfr_sgn(lo.get()) > 0;
}
inline bool certainly_negative(const Ball& a) {
  detail::Real hi = a.upper();
  return mpfr_sgn(hi.get()) < 0;
}

// ---------------------------------------------------------------------------
// Certified constants, cached per precision.
// ---------------------------------------------------------------------------

namespace detail {

template <int Which>  // 0: pi, 1: log(2)
inline const Ball& cached_const(Precision p) {
  static std::map<long, Ball> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(p.bits);
  if (it == cache.end()) {
    Ball b(p);
    int t = Which == 0 ? mpfr_const_pi(b.mid_rw(), MPFR_RNDN)
                       : mpfr_const_log2(b.mid_rw(), MPFR_RNDN);
    b.add_rad(rnd_error(b.mid(), t));
    it = cache.emplace(p.bits, std::move(b)).first;
  }
  return it->second;
}

}  // namespace detail

inline const Ball& pi_ball(Precision p) { return detail::cached_const<0>(p); }
inline const Ball& ln2_ball(Precision p) { return detail::cached_const<1>(p); }

}  // namespace nwheat
