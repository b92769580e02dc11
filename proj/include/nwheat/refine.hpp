#pragma once

#include <functional>
#include <utility>

#include "nwheat/ball.hpp"

namespace nwheat {

struct RefineResult {
  Ball value;
  bool target_met = false;
  long bits_used = 0;
};

namespace detail {

inline bool rad_leq(const Ball& b, const mpq_class& target) {
  Real t(kRadPrec);
  mpfr_set_q(t.get(), target.get_mpq_t(), MPFR_RNDD);
  return mpfr_cmp(b.rad(), t.get()) <= 0;
}

}  // namespace detail

/// Re-runs a computation doubling the working precision until the result
/// radius is at or below target_rad or the cap is reached. A stalled radius
/// (no improvement across a doubling: some certified tail floor dominates)
/// stops early; the best ball comes back flagged either way.
inline RefineResult refine(const mpq_class& target_rad,
                           const std::function<Ball(Precision)>& compute,
                           long start_bits = 128) {
  if (target_rad <= 0) throw domain_error("refine target radius must be positive");
  long bits = start_bits < 32 ? 32 : start_bits;
  Ball best = compute(Precision(bits));
  while (true) {
    if (detail::rad_leq(best, target_rad)) return {best, true, bits};
    if (bits >= precision_cap()) return {best, false, bits};
    long next = bits * 2 > precision_cap() ? precision_cap() : bits * 2;
    Ball b = compute(Precision(next));
    // No meaningful shrink means a precision-independent floor (for example a
    // declared series tail) dominates the radius.
    detail::Real half(detail::kRadPrec);
    mpfr_div_2si(half.get(), best.rad(), 1, MPFR_RNDU);
    bool improved = mpfr_cmp(b.rad(), half.get()) < 0;
    best = std::move(b);
    bits = next;
    if (!improved && !detail::rad_leq(best, target_rad))
      return {best, false, bits};
  }
}

}  // namespace nwheat
