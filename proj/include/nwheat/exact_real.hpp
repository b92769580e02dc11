#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>

#include "nwheat/ball.hpp"

namespace nwheat {

/// Parses a decimal literal ("2.5", "-1e-3", "0.1536867") or a fraction
/// ("5/2") into an exact rational. Decimal strings are exact rationals, so
/// nothing is lost here.
inline mpq_class parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw domain_error("empty numeric literal");

  if (s.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw domain_error("bad fraction literal: " + text);
    q.canonicalize();
    return q;
  }

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';

  std::string digits;
  long frac_digits = 0;
  bool seen_point = false, seen_digit = false;
  long exponent = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.') {
      if (seen_point) throw domain_error("bad numeric literal: " + text);
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      if (!seen_digit) throw domain_error("bad numeric literal: " + text);
      exponent = std::stol(s.substr(i + 1));
      break;
    } else {
      throw domain_error("bad numeric literal: " + text);
    }
  }
  if (!seen_digit) throw domain_error("bad numeric literal: " + text);

  mpz_class mant(digits.empty() ? "0" : digits, 10);
  mpq_class q(mant);
  long net = exponent - frac_digits;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
  if (net >= 0)
    q *= mpq_class(p10);
  else
    q /= mpq_class(p10);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

/// Exact scalar input: either a rational or coef * sqrt(root) with root a
/// positive non-square integer. Evaluators re-round these at every working
/// precision, so escalation never loses information.
class ExactReal {
 public:
  ExactReal() : coef_(0), root_(1) {}
  ExactReal(mpq_class q) : coef_(std::move(q)), root_(1) {}
  ExactReal(long v) : coef_(v), root_(1) {}

  static ExactReal sqrt_of(unsigned long root, mpq_class coef = 1) {
    ExactReal r;
    r.coef_ = std::move(coef);
    r.root_ = root == 0 ? 1 : root;
    if (r.root_ == 0) r.coef_ = 0;
    return r;
  }

  /// Accepts decimal/fraction literals plus "sqrt2" / "sqrt(2)" style tokens.
  static ExactReal parse(const std::string& text) {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      negative = s[0] == '-';
      s = s.substr(1);
    }
    if (s.rfind("sqrt", 0) == 0) {
      std::string arg = s.substr(4);
      if (!arg.empty() && arg.front() == '(' && arg.back() == ')')
        arg = arg.substr(1, arg.size() - 2);
      unsigned long n = std::stoul(arg);
      return sqrt_of(n, negative ? -1 : 1);
    }
    mpq_class q = parse_rational(s);
    return ExactReal(negative ? mpq_class(-q) : q);
  }

  bool is_rational() const { return root_ == 1; }
  bool is_zero() const { return coef_ == 0; }
  int sign() const { return sgn(coef_); }

  const mpq_class& rational() const {
    if (!is_rational())
      throw domain_error("exact rational required, got a sqrt expression");
    return coef_;
  }

  const mpq_class& coef() const { return coef_; }
  unsigned long root() const { return root_; }

  Ball to_ball(Precision p) const {
    Ball c = Ball::from_rational(coef_, p);
    if (root_ == 1 || coef_ == 0) return c;
    Ball r = sqrt(Ball::from_si(static_cast<long>(root_), p), p);
    return mul(c, r, p);
  }

  std::string str() const {
    if (is_rational()) return coef_.get_str();
    return coef_.get_str() + "*sqrt(" + std::to_string(root_) + ")";
  }

  friend bool operator==(const ExactReal& a, const ExactReal& b) {
    return a.root_ == b.root_ && a.coef_ == b.coef_;
  }

 private:
  mpq_class coef_;
  unsigned long root_;
};

}  // namespace nwheat
