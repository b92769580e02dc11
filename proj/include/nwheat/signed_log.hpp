#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nwheat/ball.hpp"

namespace nwheat {

/// Sign plus an enclosure of ln|value|. Carrier for quantities whose
/// magnitude exceeds any fixed-exponent format (F_N tables, factorial-scale
/// derivative values). sign == 0 represents exactly zero; logmag is
/// meaningful only when sign != 0.
struct SignedLog {
  int sign = 0;
  Ball logmag;

  SignedLog() : logmag(Ball::exact_zero(Precision(64))) {}
  explicit SignedLog(Precision p) : logmag(Ball::exact_zero(p)) {}
  SignedLog(int s, Ball lm) : sign(s), logmag(std::move(lm)) {}

  static SignedLog zero(Precision p) { return SignedLog(p); }

  /// Positive value given directly as an enclosure of its natural log.
  static SignedLog from_log(int s, Ball lm) { return SignedLog(s, std::move(lm)); }

  bool is_zero() const { return sign == 0; }
};

/// Exact conversion from a ball that does not straddle zero; nullopt when the
/// sign cannot be certified.
inline std::optional<SignedLog> try_signed_log_from_ball(const Ball& b,
                                                         Precision p) {
  if (b.is_exact_zero()) return SignedLog::zero(p);
  if (b.contains_zero()) return std::nullopt;
  return SignedLog(mpfr_sgn(b.mid()), log(abs(b), p));
}

inline SignedLog signed_log_from_ball(const Ball& b, Precision p) {
  auto s = try_signed_log_from_ball(b, p);
  if (!s) throw undecidable_error("ball straddles zero; SignedLog sign indeterminate");
  return *s;
}

/// Ball view of a SignedLog (always representable under the extended
/// exponent range used by this library; validate() guards the edge).
inline Ball ball_from_signed_log(const SignedLog& s, Precision p) {
  if (s.sign == 0) return Ball::exact_zero(p);
  Ball m = exp(s.logmag, p);
  return s.sign > 0 ? m : neg(m);
}

inline SignedLog sl_mul(const SignedLog& a, const SignedLog& b, Precision p) {
  if (a.sign == 0 || b.sign == 0) return SignedLog::zero(p);
  return SignedLog(a.sign * b.sign, add(a.logmag, b.logmag, p));
}

inline SignedLog sl_abs(const SignedLog& a) {
  return SignedLog(a.sign == 0 ? 0 : 1, a.logmag);
}

inline SignedLog sl_neg(const SignedLog& a) {
  return SignedLog(-a.sign, a.logmag);
}

/// Certified |a| > |b| (both nonzero; zero magnitude is smaller than any
/// nonzero one).
inline bool sl_certainly_greater_mag(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0) return false;
  if (b.sign == 0) return true;
  return certainly_less(b.logmag, a.logmag);
}

/// Certified a >= b for values of known sign. Comparisons are certified only
/// when the separating gap exceeds the sum of the logmag radii; otherwise the
/// answer is nullopt (inconclusive), never a guess.
inline std::optional<bool> sl_certified_geq(const SignedLog& a,
                                            const SignedLog& b) {
  if (a.sign == 0 && b.sign == 0) return true;
  if (a.sign == 0) return b.sign < 0;
  if (b.sign == 0) return a.sign > 0;
  if (a.sign > 0 && b.sign < 0) return true;
  if (a.sign < 0 && b.sign > 0) return false;
  if (a.sign > 0) {  // both positive: compare logs
    if (certainly_leq(b.logmag, a.logmag)) return true;
    if (certainly_less(a.logmag, b.logmag)) return false;
    return std::nullopt;
  }
  // both negative
  if (certainly_leq(a.logmag, b.logmag)) return true;
  if (certainly_less(b.logmag, a.logmag)) return false;
  return std::nullopt;
}

/// SignedLog of the signed sum of the terms. Alignment to the largest
/// exponent; the summation itself runs in ball space, so honest cancellation
/// shows up in the logmag radius. Returns nullopt when cancellation leaves
/// the sign uncertifiable at this precision (exact zero is still detected
/// when the terms cancel exactly).
inline std::optional<SignedLog> log_sum_exp(std::span<const SignedLog> terms,
                                            Precision p) {
  // Pivot: midpoint of the largest logmag among nonzero terms, as an exact
  // point so that sum = e^M * sum_i s_i e^(L_i - M).
  const Ball* max_lm = nullptr;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    if (!max_lm || mpfr_cmp(max_lm->mid(), t.logmag.mid()) < 0)
      max_lm = &t.logmag;
  }
  if (!max_lm) return SignedLog::zero(p);

  Ball pivot = Ball::point(max_lm->mid(), p);
  Ball acc = Ball::exact_zero(p);
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    Ball e = exp(sub(t.logmag, pivot, p), p);
    acc = t.sign > 0 ? add(acc, e, p) : sub(acc, e, p);
  }
  if (acc.is_exact_zero()) return SignedLog::zero(p);
  if (acc.contains_zero()) return std::nullopt;
  Ball lm = add(pivot, log(abs(acc), p), p);
  return SignedLog(mpfr_sgn(acc.mid()), std::move(lm));
}

inline std::optional<SignedLog> log_sum_exp(const std::vector<SignedLog>& terms,
                                            Precision p) {
  return log_sum_exp(std::span<const SignedLog>(terms.data(), terms.size()), p);
}

}  // namespace nwheat
