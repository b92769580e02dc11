#pragma once

#include <mpfr.h>

#include <utility>

#include "nwheat/numeric_env.hpp"

namespace nwheat::detail {

/// RAII wrapper around a single mpfr_t with value semantics.
class Real {
 public:
  explicit Real(long prec) {
    ensure_numeric_env();
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }

  Real(const Real& o) {
    ensure_numeric_env();
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);  // same precision: exact
  }

  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }

  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }

  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }

  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long prec() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

}  // namespace nwheat::detail
