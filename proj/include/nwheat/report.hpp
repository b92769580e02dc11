#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nwheat/signed_log.hpp"

namespace nwheat {

/// Decimal rendering of a ball. The midpoint string is correctly rounded at
/// full precision and the printed radius absorbs the decimal round-trip
/// error of the midpoint, so re-parsing the pair yields a valid enclosure
/// of the original value. Numbers are never serialized as bare floats.
struct DecimalBall {
  std::string mid;
  std::string rad;
};

namespace detail {

inline std::string mpfr_to_string(mpfr_srcptr v, long digits) {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Re", static_cast<int>(digits - 1), v);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

}  // namespace detail

inline DecimalBall serialize_ball(const Ball& b) {
  if (b.is_exact_zero()) return {"0", "0"};
  long digits = static_cast<long>(b.precision().bits * 0.30103) + 3;
  std::string mid = detail::mpfr_to_string(b.mid(), digits);

  // Fold the decimal round-trip error of the midpoint into the radius.
  detail::Real back(b.precision().bits + 64);
  mpfr_set_str(back.get(), mid.c_str(), 10, MPFR_RNDN);
  detail::Real delta(detail::kRadPrec);
  mpfr_sub(delta.get(), b.mid(), back.get(), MPFR_RNDA);
  mpfr_abs(delta.get(), delta.get(), MPFR_RNDU);
  detail::Real rad(detail::kRadPrec);
  mpfr_add(rad.get(), b.rad(), delta.get(), MPFR_RNDU);

  std::string rad_s;
  if (mpfr_zero_p(rad.get())) {
    rad_s = "0";
  } else {
    // up-bias before 3-digit printing so the printed radius stays an upper bound
    mpfr_mul_d(rad.get(), rad.get(), 1.02, MPFR_RNDU);
    rad_s = detail::mpfr_to_string(rad.get(), 3);
  }
  return {mid, rad_s};
}

struct DecimalSignedLog {
  int sign;
  DecimalBall logmag;
};

inline DecimalSignedLog serialize_signed_log(const SignedLog& s) {
  if (s.sign == 0) return {0, {"0", "0"}};
  return {s.sign, serialize_ball(s.logmag)};
}

/// log10 view of a SignedLog magnitude (plot/CSV convenience only; the
/// certified figure is the serialized pair).
inline std::string signed_log_log10(const SignedLog& s) {
  if (s.sign == 0) return "-inf";
  double v = s.logmag.mid_double() / 2.302585092994046;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Minimal deterministic SVG line charts (file emission only).
// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<SvgSeries>& series) {
  const double W = 900, H = 560, ml = 90, mr = 30, mt = 50, mb = 70;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::ofstream f(path);
  if (!f) throw error("cannot write SVG file: " + path);
  char buf[256];
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
    << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
       "font-family=\"sans-serif\">" << title << "</text>\n";
  // axes
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  f << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  f << buf;
  for (int i = 0; i <= 5; ++i) {
    double fx = xmin + (xmax - xmin) * i / 5.0;
    double fy = ymin + (ymax - ymin) * i / 5.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"12\" "
                  "font-family=\"sans-serif\">%.6g</text>\n",
                  X(fx), H - mb + 20, fx);
    f << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"12\" "
                  "font-family=\"sans-serif\">%.6g</text>\n",
                  ml - 8, Y(fy) + 4, fy);
    f << buf;
  }
  f << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 18
    << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
    << xlabel << "</text>\n";
  f << "<text x=\"20\" y=\"" << (mt + (H - mt - mb) / 2)
    << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
       "transform=\"rotate(-90 20 " << (mt + (H - mt - mb) / 2) << ")\">"
    << ylabel << "</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int ci = 0;
  for (const auto& s : series) {
    f << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4]
      << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.points) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(x), Y(y));
      f << buf;
    }
    f << "\"/>\n";
    if (!s.label.empty()) {
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\" "
                    "font-family=\"sans-serif\">%s</text>\n",
                    W - mr - 180.0, mt + 18.0 * (ci + 1), colors[ci % 4],
                    s.label.c_str());
      f << buf;
    }
    ++ci;
  }
  f << "</svg>\n";
}

}  // namespace nwheat
