#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nwheat/derivatives.hpp"

namespace nwheat {

/// Unique m_N with 2^N (1+x0) <= 4 m_N < 2^N (1+x0) + 4, i.e. the ceiling of
/// 2^N (1+x0) / 4, in exact rational arithmetic.
inline mpz_class choose_mN(const mpq_class& x0, long N) {
  if (N < 1) throw domain_error("N must be >= 1");
  if (x0 < 0) throw domain_error("u1 replay requires x0 >= 0");
  mpq_class q = (x0 + 1) << N;  // 2^N (1+x0)
  mpz_class m;
  mpz_class den4 = q.get_den() * 4;
  mpz_cdiv_q(m.get_mpz_t(), q.get_num().get_mpz_t(), den4.get_mpz_t());
  if (!(q <= 4 * mpq_class(m) && 4 * mpq_class(m) < q + 4))
    throw error("m_N window violated");  // unreachable by construction
  return m;
}

/// Unique m_N with (2^(eps N) + x0) 2^N <= 4 m_N < ... + 4, under the
/// precondition 2^(eps N) >= 2 + |x0|. Exact when eps*N is an integer,
/// decided in ball arithmetic with escalation otherwise.
inline mpz_class choose_mN_weps(const mpq_class& eps, const mpq_class& x0,
                                long N, long start_bits = 192) {
  if (N < 1) throw domain_error("N must be >= 1");
  if (eps <= 0 || eps >= 1) throw domain_error("eps must lie in (0,1)");
  mpq_class en = eps * N;
  mpq_class need = 2 + ::abs(x0);
  if (en.get_den() == 1) {
    mpq_class p2(mpz_class(1) << mpz_get_ui(en.get_num().get_mpz_t()));
    if (p2 < need)
      throw domain_error("precondition 2^(eps N) >= 2 + |x0| fails");
    mpq_class q = (p2 + x0) << N;
    mpz_class m;
    mpz_class den4 = q.get_den() * 4;
    mpz_cdiv_q(m.get_mpz_t(), q.get_num().get_mpz_t(), den4.get_mpz_t());
    return m;
  }
  long bits = start_bits;
  while (true) {
    Precision p{bits};
    Ball p2 = detail::pow2_rational(en, p);
    Ball needb = Ball::from_rational(need, p);
    if (certainly_less(p2, needb))
      throw domain_error("precondition 2^(eps N) >= 2 + |x0| fails");
    if (!certainly_leq(needb, p2)) {
      if (bits >= precision_cap())
        throw undecidable_error("m_N precondition undecidable at cap");
      bits = std::min(bits * 2, precision_cap());
      continue;
    }
    // target = (2^(eps N) + x0) 2^(N-2); m = ceil(target)
    Ball target = mul_2si(add(p2, Ball::from_rational(x0, p), p), N - 2);
    detail::Real lo = target.lower(), hi = target.upper();
    mpz_class clo, chi;
    mpfr_get_z(clo.get_mpz_t(), lo.get(), MPFR_RNDU);  // ceil of lower
    mpfr_get_z(chi.get_mpz_t(), hi.get(), MPFR_RNDU);  // ceil of upper
    if (clo == chi) return clo;
    if (bits >= precision_cap())
      throw undecidable_error("m_N boundary undecidable at cap");
    bits = std::min(bits * 2, precision_cap());
  }
}

/// ln F_N(k) for the u1 weights: 2 m_N (2k+1) ln 2 - 2^k (1 + x0).
/// The log-magnitude is an exact-rational combination of ln 2 and 2^k terms.
inline SignedLog weight_FN_u1(const mpq_class& x0, const mpz_class& mN, long k,
                              Precision p) {
  if (k < 1) throw domain_error("F_N is defined for k >= 1");
  Ball a = mul(Ball::from_mpz(2 * mN * (2 * k + 1), p), ln2_ball(p), p);
  Ball b = Ball::from_rational((x0 + 1) << k, p);
  return SignedLog(1, sub(a, b, p));
}

/// ln F_N(k) for the w_eps weights:
/// 2 m_N (2k+1) ln 2 - 2^((1+eps)k) - 2^k x0.
inline SignedLog weight_FN_weps(const mpq_class& eps, const mpq_class& x0,
                                const mpz_class& mN, long k, Precision p) {
  if (k < 1) throw domain_error("F_N is defined for k >= 1");
  Ball a = mul(Ball::from_mpz(2 * mN * (2 * k + 1), p), ln2_ball(p), p);
  Ball b = detail::pow2_rational((eps + 1) * k, p);
  Ball c = Ball::from_rational(x0 * (mpz_class(1) << k), p);
  return SignedLog(1, sub(sub(a, b, p), c, p));
}

inline SignedLog weight_FN(SolutionKind kind, const mpq_class& x0,
                           const std::optional<mpq_class>& eps,
                           const mpz_class& mN, long k, Precision p) {
  if (kind == SolutionKind::WEPS) {
    if (!eps) throw domain_error("w_eps weight needs eps");
    return weight_FN_weps(*eps, x0, mN, k, p);
  }
  return weight_FN_u1(x0, mN, k, p);
}

struct DominanceResult {
  bool passed = false;
  bool inconclusive = false;
  SignedLog lhs;  // sum_{k != N} 2^(2k) F_N(k), with certified tail
  SignedLog rhs;  // F_N(N) / 100
  long terms_used = 0;
  std::vector<SignedLog> f_table;  // F_N(k) for k = 1..terms_used
  SignedLog tail;
};

namespace detail {

// ln(F(k+1)) - ln(F(k)); decreasing in k (for w_eps beyond the crossover).
inline Ball delta_lnF(SolutionKind kind, const mpq_class& x0,
                      const std::optional<mpq_class>& eps, const mpz_class& mN,
                      long k, Precision p) {
  Ball four_m_ln2 = mul(Ball::from_mpz(4 * mN, p), ln2_ball(p), p);
  if (kind == SolutionKind::WEPS) {
    Ball base = pow2_rational((*eps + 1) * k, p);
    Ball factor = sub(pow2_rational(*eps + 1, p), Ball::from_si(1, p), p);
    Ball xterm = Ball::from_rational(x0 * (mpz_class(1) << k), p);
    return sub(four_m_ln2, add(mul(base, factor, p), xterm, p), p);
  }
  return sub(four_m_ln2, Ball::from_rational((x0 + 1) << k, p), p);
}

inline long weps_crossover(const mpq_class& eps, const mpq_class& x0) {
  mpq_class ax1 = ::abs(x0) + 1;
  if (ax1 <= 1) return 1;
  Precision p{256};
  Ball bound = Ball::from_rational(ax1, p);
  for (long k = 1; k <= 4000; ++k) {
    mpq_class ek = eps * k;
    if (ek.get_den() == 1) {
      if (mpq_class(mpz_class(1) << mpz_get_ui(ek.get_num().get_mpz_t())) >= ax1)
        return k;
    } else {
      Ball v = pow2_rational(ek, p);
      if (certainly_leq(bound, v)) return k;
      if (!certainly_less(v, bound))
        throw undecidable_error("crossover comparison undecidable");
    }
  }
  throw undecidable_error("crossover search runaway");
}

}  // namespace detail

/// Decides  sum_{k != N} 2^(2k) F_N(k) <= F_N(N) / 100  with a certified
/// truncated sum plus geometric tail. Both sides come back as SignedLogs;
/// an undecidable comparison at the precision cap reports inconclusive.
inline DominanceResult dominance_check(SolutionKind kind, const mpq_class& x0,
                                       const std::optional<mpq_class>& eps,
                                       long N, long start_bits = 128) {
  if (N < 1) throw domain_error("N must be >= 1");
  mpz_class mN = kind == SolutionKind::WEPS
                     ? choose_mN_weps(*eps, x0, N)
                     : choose_mN(x0, N);
  long kmin = kind == SolutionKind::WEPS ? detail::weps_crossover(*eps, x0) : 1;

  long bits = start_bits;
  while (true) {
    Precision p{bits};
    Ball minus_3ln2 = mul(Ball::from_si(-3, p), ln2_ball(p), p);

    // Truncation index: first k past max(N, kmin) where the summand ratio
    // 4 F(k+1)/F(k) is certified <= 1/2 (monotone beyond, so the tail is
    // geometric with ratio 1/2: tail <= 2 * s_{Ktr+1}).
    long Ktr = std::max(N + 2, kmin + 1);
    bool ok = false;
    for (; Ktr < 500; ++Ktr) {
      Ball d = detail::delta_lnF(kind, x0, eps, mN, Ktr, p);
      if (certainly_leq(d, minus_3ln2)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw precision_cap_error("dominance truncation did not certify");
    Ktr += 2;  // margin

    std::vector<SignedLog> table, terms;
    table.reserve(Ktr);
    for (long k = 1; k <= Ktr; ++k) {
      SignedLog f = weight_FN(kind, x0, eps, mN, k, p);
      table.push_back(f);
      if (k == N) continue;
      terms.emplace_back(1, add(f.logmag,
                                mul(Ball::from_si(2 * k, p), ln2_ball(p), p), p));
    }
    // tail: 2 * 2^(2(Ktr+1)) F(Ktr+1)
    SignedLog fnext = weight_FN(kind, x0, eps, mN, Ktr + 1, p);
    SignedLog tail(1, add(fnext.logmag,
                          add(mul(Ball::from_si(2 * (Ktr + 1), p), ln2_ball(p), p),
                              ln2_ball(p), p),
                          p));
    terms.push_back(tail);

    auto lhs = log_sum_exp(terms, p);
    SignedLog rhs(1, sub(table[static_cast<std::size_t>(N - 1)].logmag,
                         log(Ball::from_si(100, p), p), p));
    if (lhs) {
      auto cmp = sl_certified_geq(rhs, *lhs);
      if (cmp.has_value())
        return {*cmp, false, *lhs, rhs, Ktr, std::move(table), tail};
    }
    if (bits >= precision_cap()) {
      SignedLog l = lhs ? *lhs : SignedLog::zero(p);
      return {false, true, l, rhs, Ktr, std::move(table), tail};
    }
    bits = std::min(bits * 2, precision_cap());
  }
}

/// Minimal N0 <= Nmax such that dominance holds for every admissible
/// N in [N0, Nmax]. For w_eps the scan starts at the first N satisfying the
/// m_N precondition. Absent result = not found below Nmax.
inline std::optional<long> find_N0(SolutionKind kind, const mpq_class& x0,
                                   const std::optional<mpq_class>& eps,
                                   long Nmax, long start_bits = 128) {
  if (Nmax > 30) throw domain_error("find_N0 capped at Nmax = 30");
  std::optional<long> candidate;
  for (long N = 1; N <= Nmax; ++N) {
    bool pass = false;
    try {
      DominanceResult d = dominance_check(kind, x0, eps, N, start_bits);
      pass = d.passed && !d.inconclusive;
    } catch (const domain_error&) {
      // below the w_eps precondition: not an admissible N
      candidate.reset();
      continue;
    }
    if (pass) {
      if (!candidate) candidate = N;
    } else {
      candidate.reset();
    }
  }
  return candidate;
}

struct LowerBoundResult {
  bool passed = false;
  bool inconclusive = false;
  SignedLog lhs;  // certified lower bound of |h^(2m)| + |h^(2m+1)|
  SignedLog rhs;  // F_N(N) / 2
  mpz_class mN;
  TimeDerivative d_even, d_odd;
};

/// Replays |h^(2 m_N)(t0)| + |h^(2 m_N + 1)(t0)| >= F_N(N) / 2 for one N.
/// Derivative magnitudes enter through certified lower bounds, so a
/// sign-indeterminate derivative only weakens the left side (it never
/// fabricates a pass).
inline LowerBoundResult lower_bound_check(const SolutionId& id,
                                          const mpq_class& x0,
                                          const ExactReal& t0, long N,
                                          const DerivOptions& dopt = {}) {
  if (id.kind == SolutionKind::U2)
    throw domain_error("lower_bound_check applies to u1 and w_eps");
  std::optional<mpq_class> eps =
      id.kind == SolutionKind::WEPS ? std::optional<mpq_class>(id.eps) : std::nullopt;
  mpz_class mN = id.kind == SolutionKind::WEPS ? choose_mN_weps(id.eps, x0, N)
                                               : choose_mN(x0, N);
  if (!mN.fits_slong_p())
    throw domain_error("derivative order exceeds the machine range");
  long m = mN.get_si();

  TimeDerivative de = time_derivative(id, 2 * m, ExactReal(x0), t0, dopt);
  TimeDerivative dodd = time_derivative(id, 2 * m + 1, ExactReal(x0), t0, dopt);

  Precision p{std::max(de.bits_used, dodd.bits_used)};
  Ball lhs_ball = add(Ball::point(de.value.abs_lower().get(), p),
                      Ball::point(dodd.value.abs_lower().get(), p), p);
  SignedLog rhs(1, sub(weight_FN(id.kind, x0, eps, mN, N, p).logmag,
                       ln2_ball(p), p));

  auto lhs = try_signed_log_from_ball(lhs_ball, p);
  if (!lhs || lhs->is_zero()) {
    SignedLog l = lhs ? *lhs : SignedLog::zero(p);
    return {false, true, l, rhs, mN, de, dodd};
  }
  auto cmp = sl_certified_geq(*lhs, rhs);
  if (!cmp.has_value()) return {false, true, *lhs, rhs, mN, de, dodd};
  return {*cmp, false, *lhs, rhs, mN, de, dodd};
}

struct GrowthRow {
  long N = 0;
  mpz_class mN;
  long order = 0;
  std::optional<SignedLog> root;  // (|h^(n)|/n!)^(1/n); absent if indeterminate
  bool zero_derivative = false;   // exact zero: excluded from the comparison
  SignedLog floor_value;          // analytic floor, exponent 2 m_N / n
  std::optional<bool> row_ok;     // root >= floor (absent if not comparable)
};

struct GrowthScan {
  std::vector<GrowthRow> rows;
  // Per N: the paired inequality (|h^(2m)| + |h^(2m+1)|)/(2m+1)! >= floor^(2m).
  std::vector<std::pair<long, std::optional<bool>>> pair_ok;
};

namespace detail {

// ln of the analytic floor base: (m-1)^2 / (D^2 (2m+1)) with D = 1+x0 for u1
// and D = 2^(eps N) + x0 for w_eps. Zero floor (m <= 1) comes back as nullopt.
inline std::optional<Ball> ln_floor_base(const SolutionId& id,
                                         const mpq_class& x0, long N,
                                         const mpz_class& mN, Precision p) {
  if (mN <= 1) return std::nullopt;
  Ball num = mul_2si(log(Ball::from_mpz(mN - 1, p), p), 1);
  Ball den_d = id.kind == SolutionKind::WEPS
                   ? add(pow2_rational(id.eps * N, p),
                         Ball::from_rational(x0, p), p)
                   : Ball::from_rational(x0 + 1, p);
  Ball den = add(mul_2si(log(den_d, p), 1),
                 log(Ball::from_mpz(2 * mN + 1, p), p), p);
  return sub(num, den, p);
}

}  // namespace detail

/// For each N in [Nlo, Nhi] and n in {2 m_N, 2 m_N + 1}: the coefficient
/// root (|h^(n)|/n!)^(1/n) next to the analytic floor base^(2 m_N / n),
/// flagging any comparable row with root < floor. Zero derivatives (the
/// even orders at the origin) are excluded from the row comparison; the
/// paired inequality per N is checked as well.
inline GrowthScan taylor_growth_scan(const SolutionId& id, const mpq_class& x0,
                                     const ExactReal& t0, long Nlo, long Nhi,
                                     const DerivOptions& dopt = {}) {
  if (id.kind == SolutionKind::U2)
    throw domain_error("taylor_growth_scan applies to u1 and w_eps");
  if (Nlo < 1 || Nhi < Nlo) throw domain_error("bad N range");

  GrowthScan out;
  Precision p{128};
  LnFactorial lnfact(p);

  for (long N = Nlo; N <= Nhi; ++N) {
    mpz_class mN = id.kind == SolutionKind::WEPS
                       ? choose_mN_weps(id.eps, x0, N)
                       : choose_mN(x0, N);
    if (!mN.fits_slong_p() || 2 * mN.get_si() + 1 > 1000000)
      throw domain_error("scan order exceeds the ln n! range (n <= 10^6)");
    long m = mN.get_si();
    auto lfb = detail::ln_floor_base(id, x0, N, mN, p);

    TimeDerivative d_even = time_derivative(id, 2 * m, ExactReal(x0), t0, dopt);
    TimeDerivative d_odd = time_derivative(id, 2 * m + 1, ExactReal(x0), t0, dopt);

    for (const TimeDerivative* d : {&d_even, &d_odd}) {
      GrowthRow row;
      row.N = N;
      row.mN = mN;
      row.order = d->order;
      Ball floor_ln = lfb ? mul(Ball::from_rational(mpq_class(2 * m, d->order), p),
                                *lfb, p)
                          : Ball::exact_zero(p);
      row.floor_value = lfb ? SignedLog(1, floor_ln) : SignedLog::zero(p);
      if (d->indeterminate) {
        out.rows.push_back(std::move(row));
        continue;
      }
      if (d->value_log.is_zero()) {
        row.zero_derivative = true;
        row.root = SignedLog::zero(p);
        out.rows.push_back(std::move(row));
        continue;
      }
      Ball root_ln = div(sub(d->value_log.logmag, lnfact.advance_to(d->order), p),
                         Ball::from_si(d->order, p), p);
      row.root = SignedLog(1, root_ln);
      if (!lfb)
        row.row_ok = true;  // zero floor
      else
        row.row_ok = sl_certified_geq(*row.root, row.floor_value);
      out.rows.push_back(std::move(row));
    }

    // Paired inequality per N.
    std::optional<bool> pair;
    Ball lhs_ball = add(Ball::point(d_even.value.abs_lower().get(), p),
                        Ball::point(d_odd.value.abs_lower().get(), p), p);
    auto lhs = try_signed_log_from_ball(lhs_ball, p);
    if (lhs && !lhs->is_zero()) {
      Ball lhs_ln = sub(lhs->logmag, lnfact.advance_to(2 * m + 1), p);
      Ball rhs_ln = lfb ? mul(Ball::from_si(2 * m, p), *lfb, p)
                        : Ball::exact_zero(p);
      if (!lfb)
        pair = true;
      else
        pair = sl_certified_geq(SignedLog(1, lhs_ln), SignedLog(1, rhs_ln));
    }
    out.pair_ok.emplace_back(N, pair);
  }
  return out;
}

/// One complete replay record for a given (solution, x0, t0, N).
struct ProofReplayRecord {
  SolutionId solution;
  mpq_class x0;
  ExactReal t0;
  long N = 0;
  mpz_class mN;
  std::vector<SignedLog> f_table;
  SignedLog f_tail;
  bool dominance = false;
  bool dominance_inconclusive = false;
  SignedLog dom_lhs, dom_rhs;
  bool lower_bound_ok = false;
  bool lower_bound_inconclusive = false;
  SignedLog lb_lhs, lb_rhs;
  std::optional<SignedLog> coefficient_root;  // at order 2 m_N + 1
};

inline ProofReplayRecord replay_record(const SolutionId& id, const mpq_class& x0,
                                       const ExactReal& t0, long N,
                                       const DerivOptions& dopt = {}) {
  std::optional<mpq_class> eps =
      id.kind == SolutionKind::WEPS ? std::optional<mpq_class>(id.eps) : std::nullopt;
  DominanceResult dom = dominance_check(id.kind, x0, eps, N);
  LowerBoundResult lb = lower_bound_check(id, x0, t0, N, dopt);

  ProofReplayRecord rec{id,    x0,    t0,    N,     lb.mN, dom.f_table,
                        dom.tail,     dom.passed,   dom.inconclusive,
                        dom.lhs,      dom.rhs,      lb.passed,
                        lb.inconclusive,            lb.lhs, lb.rhs,
                        std::nullopt};
  if (lb.mN.fits_slong_p() && 2 * lb.mN.get_si() + 1 <= 1000000 &&
      !lb.d_odd.indeterminate && !lb.d_odd.value_log.is_zero()) {
    Precision p{128};
    long n = 2 * lb.mN.get_si() + 1;
    Ball root_ln = div(sub(lb.d_odd.value_log.logmag, ln_factorial(n, p), p),
                       Ball::from_si(n, p), p);
    rec.coefficient_root = SignedLog(1, root_ln);
  }
  return rec;
}

}  // namespace nwheat
