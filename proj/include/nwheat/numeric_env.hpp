#pragma once

#include <mpfr.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nwheat {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside an operation's mathematical domain (log of a ball
/// touching zero, division by a ball containing zero, x < 0 for u1/u2, ...).
class domain_error : public error {
 public:
  using error::error;
};

/// The precision-escalation cap was reached before a result could be
/// certified.
class precision_cap_error : public error {
 public:
  using error::error;
};

/// A comparison or integer selection could not be decided at the maximum
/// working precision (a ball straddles the decision boundary).
class undecidable_error : public error {
 public:
  using error::error;
};

/// Working-precision ceiling in bits. Defaults to 16384; the environment
/// variable NWHEAT_PREC_CAP overrides it (read once per process).
inline long precision_cap() {
  static const long cap = [] {
    if (const char* s = std::getenv("NWHEAT_PREC_CAP")) {
      char* end = nullptr;
      long v = std::strtol(s, &end, 10);
      if (end != s && v >= 32) return v;
    }
    return 16384L;
  }();
  return cap;
}

/// Widens MPFR's exponent range to its platform maximum (roughly +-2^62)
/// for the calling thread. Every entry point that touches mpfr calls this;
/// the widened range is what lets a single Ball carry magnitudes such as
/// 2^(2*m_N*(2k+1)) without switching to log space.
inline void ensure_numeric_env() {
  thread_local const bool done = [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    return true;
  }();
  (void)done;
}

struct Precision {
  long bits;

  explicit Precision(long b) : bits(b) {
    if (b < 32) throw domain_error("precision below 32 bits");
    if (b > precision_cap())
      throw precision_cap_error("precision " + std::to_string(b) +
                                " exceeds cap " + std::to_string(precision_cap()));
  }
};

}  // namespace nwheat
