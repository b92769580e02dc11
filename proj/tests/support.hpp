#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "nwheat/ball.hpp"
#include "nwheat/exact_real.hpp"

namespace testutil {

using nwheat::Ball;
using nwheat::Precision;

inline Precision P(long bits) { return Precision(bits); }

/// True value reference computed at high precision, rounded to double.
inline double ref_double(mpfr_srcptr v) { return mpfr_get_d(v, MPFR_RNDN); }

inline bool ball_contains_double(const Ball& b, double v) {
  nwheat::detail::Real r(64);
  mpfr_set_d(r.get(), v, MPFR_RNDN);
  return b.contains_value(r.get());
}

/// |mid(b) - v| <= tol, for quick magnitude checks against literals.
inline bool mid_close(const Ball& b, double v, double tol) {
  return std::abs(b.mid_double() - v) <= tol;
}

/// Check against a double literal: the ball must be tight and sit within tol
/// of the literal. (A tight high-precision ball will not *contain* a double
/// approximation, so containment is the wrong test for literals.)
inline bool encloses_literal(const Ball& b, double v, double tol = 1e-13) {
  return mid_close(b, v, tol) && mpfr_cmp_d(b.rad(), tol) <= 0;
}

inline std::string ball_str(const Ball& b) {
  char* m = nullptr;
  char* r = nullptr;
  mpfr_asprintf(&m, "%.30Rg", b.mid());
  mpfr_asprintf(&r, "%.5Rg", b.rad());
  std::string s = std::string("[mid=") + m + " rad=" + r + "]";
  mpfr_free_str(m);
  mpfr_free_str(r);
  return s;
}

inline std::mt19937_64 rng(unsigned long long seed) {
  return std::mt19937_64(seed);
}

/// Random rational with numerator in [-scale, scale] and denominator in
/// [1, den_max]; exact, so tests can re-round at any precision.
inline mpq_class random_rational(std::mt19937_64& g, long scale, long den_max) {
  std::uniform_int_distribution<long> num(-scale, scale);
  std::uniform_int_distribution<long> den(1, den_max);
  mpq_class q(num(g), den(g));
  q.canonicalize();
  return q;
}

}  // namespace testutil
