// Command-line front end: certified evaluation, derivatives, proof replay,
// growth-envelope certification, residual checks, and plot emission for the
// nowhere-time-analytic heat solutions library.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nwheat/nwheat.hpp"

using json = nlohmann::ordered_json;
using namespace nwheat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

json ball_json(const Ball& b) {
  DecimalBall d = serialize_ball(b);
  return json{{"mid", d.mid}, {"rad", d.rad}};
}

json signed_log_json(const SignedLog& s) {
  DecimalSignedLog d = serialize_signed_log(s);
  return json{{"sign", d.sign},
              {"logmag", {{"mid", d.logmag.mid}, {"rad", d.logmag.rad}}},
              {"log10", signed_log_log10(s)}};
}

struct OutputSink {
  std::string path;  // empty: stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (text.empty() || text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream f(path);
    if (!f) throw error("cannot open output file: " + path);
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
  }
};

std::string csv_join(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  return row;
}

std::pair<mpq_class, mpq_class> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw domain_error("range must look like lo:hi, got " + s);
  return {parse_rational(s.substr(0, colon)), parse_rational(s.substr(colon + 1))};
}

SolutionId solution_from(const std::string& name, const std::string& eps_str) {
  if (name == "u1") return SolutionId::u1();
  if (name == "u2") return SolutionId::u2();
  if (name == "weps") {
    if (eps_str.empty()) throw domain_error("weps requires --eps");
    return SolutionId::weps(parse_rational(eps_str));
  }
  throw domain_error("unknown solution: " + name);
}

json doc_skeleton(const std::string& command, json params) {
  return json{{"schema_version", 1},
              {"command", command},
              {"params", std::move(params)},
              {"results", json::array()},
              {"certified", false}};
}

std::string dump(const json& doc) { return doc.dump(2); }

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string solution = "u1", eps, x = "0", t = "0";
  std::string target_rad = "1e-24";
  long prec = 128;
  long random_points = 0;
  std::string x_range = "0:2", t_range = "-1:1";
  unsigned long long seed = 1;
  std::string format = "json", out;
};

int run_eval(const EvalArgs& a) {
  SolutionId id = solution_from(a.solution, a.eps);
  EvalOptions opt;
  opt.target_rad = parse_rational(a.target_rad);
  opt.start_bits = a.prec;

  json doc = doc_skeleton(
      "eval", json{{"solution", a.solution},
                   {"eps", a.eps},
                   {"x", a.x},
                   {"t", a.t},
                   {"prec", a.prec},
                   {"target_rad", a.target_rad},
                   {"random_points", a.random_points},
                   {"seed", a.seed}});
  std::vector<std::vector<std::string>> csv_rows;
  bool all_met = true;

  auto run_point = [&](const ExactReal& x, const ExactReal& t) {
    EvalResult r = eval_solution(id, x, t, opt);
    all_met = all_met && r.target_met;
    json row{{"x", x.str()},
             {"t", t.str()},
             {"value", ball_json(r.value)},
             {"terms_used", r.terms_used},
             {"tail_bound", ball_json(r.tail_bound)},
             {"target_met", r.target_met},
             {"bits", r.bits_used}};
    doc["results"].push_back(row);
    DecimalBall v = serialize_ball(r.value), tb = serialize_ball(r.tail_bound);
    csv_rows.push_back({a.solution, a.eps, x.str(), t.str(), v.mid, v.rad,
                        std::to_string(r.terms_used), tb.mid,
                        r.target_met ? "1" : "0"});
  };

  if (a.random_points > 0) {
    auto [xlo, xhi] = parse_range(a.x_range);
    auto [tlo, thi] = parse_range(a.t_range);
    std::mt19937_64 g(a.seed);
    std::uniform_real_distribution<double> ux(xlo.get_d(), xhi.get_d());
    std::uniform_real_distribution<double> ut(tlo.get_d(), thi.get_d());
    for (long i = 0; i < a.random_points; ++i) {
      mpq_class xq(ux(g)), tq(ut(g));  // doubles are exact rationals
      if (id.kind != SolutionKind::WEPS && xq < 0) xq = -xq;
      run_point(ExactReal(xq), ExactReal(tq));
    }
  } else {
    run_point(ExactReal::parse(a.x), ExactReal::parse(a.t));
  }
  doc["certified"] = all_met;

  OutputSink sink{a.out};
  if (a.format == "csv") {
    std::string text =
        "solution,eps,x,t,mid,rad,terms_used,tail_bound,target_met\n";
    for (const auto& r : csv_rows) text += csv_join(r) + "\n";
    sink.write(text);
  } else {
    sink.write(dump(doc));
  }
  return all_met ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct DerivArgs {
  std::string solution = "u1", eps, x0 = "0", t0 = "0";
  long n = 1;
  long prec = 128;
  std::string format = "json", out;
};

int run_derivative(const DerivArgs& a) {
  SolutionId id = solution_from(a.solution, a.eps);
  DerivOptions opt;
  opt.start_bits = a.prec;
  TimeDerivative d = time_derivative(id, a.n, ExactReal::parse(a.x0),
                                     ExactReal::parse(a.t0), opt);
  json doc = doc_skeleton("derivative",
                          json{{"solution", a.solution},
                               {"eps", a.eps},
                               {"n", a.n},
                               {"x0", a.x0},
                               {"t0", a.t0},
                               {"prec", a.prec}});
  doc["results"].push_back(json{{"n", a.n},
                                {"value", ball_json(d.value)},
                                {"value_log", signed_log_json(d.value_log)},
                                {"indeterminate", d.indeterminate},
                                {"terms_used", d.terms_used},
                                {"tail_bound", ball_json(d.tail_bound)},
                                {"bits", d.bits_used}});
  doc["certified"] = !d.indeterminate;

  OutputSink sink{a.out};
  if (a.format == "csv") {
    DecimalBall v = serialize_ball(d.value);
    DecimalSignedLog sl = serialize_signed_log(d.value_log);
    std::string text =
        "solution,eps,n,x0,t0,mid,rad,sign,logmag_mid,logmag_rad,indeterminate\n";
    text += csv_join({a.solution, a.eps, std::to_string(a.n), a.x0, a.t0, v.mid,
                      v.rad, std::to_string(sl.sign), sl.logmag.mid,
                      sl.logmag.rad, d.indeterminate ? "1" : "0"}) +
            "\n";
    sink.write(text);
  } else {
    sink.write(dump(doc));
  }
  return d.indeterminate ? kExitCheckFailed : kExitOk;
}

// ---------------------------------------------------------------------------

struct TaylorArgs {
  std::string solution = "u1", eps, x0 = "0", t0 = "0";
  long n_from = 1, n_to = 0;  // n_to == 0: single n_from
  std::string format = "json", out;
};

int run_taylor(const TaylorArgs& a) {
  SolutionId id = solution_from(a.solution, a.eps);
  long hi = a.n_to > 0 ? a.n_to : a.n_from;
  json doc = doc_skeleton("taylor", json{{"solution", a.solution},
                                         {"eps", a.eps},
                                         {"x0", a.x0},
                                         {"t0", a.t0},
                                         {"n_from", a.n_from},
                                         {"n_to", hi}});
  std::string csv = "solution,eps,x0,t0,n,sign,logmag_mid,logmag_rad,root_log10\n";
  bool all_present = true;
  for (long n = a.n_from; n <= hi; ++n) {
    auto root = taylor_coefficient(id, n, ExactReal::parse(a.x0),
                                   ExactReal::parse(a.t0));
    json row{{"n", n}};
    if (root) {
      row["root"] = signed_log_json(*root);
      DecimalSignedLog sl = serialize_signed_log(*root);
      csv += csv_join({a.solution, a.eps, a.x0, a.t0, std::to_string(n),
                       std::to_string(sl.sign), sl.logmag.mid, sl.logmag.rad,
                       signed_log_log10(*root)}) +
             "\n";
    } else {
      row["indeterminate"] = true;
      all_present = false;
      csv += csv_join({a.solution, a.eps, a.x0, a.t0, std::to_string(n), "", "",
                       "", "indeterminate"}) +
             "\n";
    }
    doc["results"].push_back(row);
  }
  doc["certified"] = all_present;
  OutputSink sink{a.out};
  sink.write(a.format == "csv" ? csv : dump(doc));
  return all_present ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct ReplayArgs {
  std::string solution = "u1", eps, x0 = "0";
  std::vector<std::string> t0s;
  long nmax = 20;
  std::string format = "json", out;
};

int run_proof_replay(const ReplayArgs& a) {
  SolutionId id = solution_from(a.solution, a.eps);
  if (id.kind == SolutionKind::U2)
    throw domain_error("proof-replay applies to u1 and weps");
  mpq_class x0 = parse_rational(a.x0);
  std::optional<mpq_class> eps =
      id.kind == SolutionKind::WEPS ? std::optional<mpq_class>(id.eps)
                                    : std::nullopt;
  std::vector<std::string> t0s = a.t0s;
  if (t0s.empty()) t0s = {"0", "1", "sqrt2"};

  json doc = doc_skeleton("proof-replay", json{{"solution", a.solution},
                                               {"eps", a.eps},
                                               {"x0", a.x0},
                                               {"t0", t0s},
                                               {"nmax", a.nmax}});
  std::string csv =
      "solution,eps,x0,t0,N,mN,dominance,dom_lhs_log10,dom_rhs_log10,"
      "lower_bound_ok,lb_lhs_log10,lb_rhs_log10,root_log10\n";

  auto n0 = find_N0(id.kind, x0, eps, a.nmax);
  doc["results"].push_back(json{{"N0", n0 ? json(*n0) : json(nullptr)}});
  bool ok = n0.has_value();
  if (n0) {
    for (long N = *n0; N <= a.nmax; ++N) {
      for (const std::string& t0_s : t0s) {
        ProofReplayRecord rec = replay_record(id, x0, ExactReal::parse(t0_s), N);
        ok = ok && rec.dominance && rec.lower_bound_ok &&
             !rec.dominance_inconclusive && !rec.lower_bound_inconclusive;
        json row{{"N", N},
                 {"t0", t0_s},
                 {"mN", rec.mN.get_str()},
                 {"dominance", rec.dominance},
                 {"dominance_inconclusive", rec.dominance_inconclusive},
                 {"dom_lhs", signed_log_json(rec.dom_lhs)},
                 {"dom_rhs", signed_log_json(rec.dom_rhs)},
                 {"lower_bound_ok", rec.lower_bound_ok},
                 {"lower_bound_inconclusive", rec.lower_bound_inconclusive},
                 {"lb_lhs", signed_log_json(rec.lb_lhs)},
                 {"lb_rhs", signed_log_json(rec.lb_rhs)}};
        if (rec.coefficient_root)
          row["coefficient_root"] = signed_log_json(*rec.coefficient_root);
        doc["results"].push_back(row);
        csv += csv_join({a.solution, a.eps, a.x0, t0_s, std::to_string(N),
                         rec.mN.get_str(), rec.dominance ? "1" : "0",
                         signed_log_log10(rec.dom_lhs),
                         signed_log_log10(rec.dom_rhs),
                         rec.lower_bound_ok ? "1" : "0",
                         signed_log_log10(rec.lb_lhs),
                         signed_log_log10(rec.lb_rhs),
                         rec.coefficient_root
                             ? signed_log_log10(*rec.coefficient_root)
                             : ""}) +
               "\n";
      }
    }
  }
  doc["certified"] = ok;
  OutputSink sink{a.out};
  sink.write(a.format == "csv" ? csv : dump(doc));
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct EnvelopeArgs {
  std::string eps = "0.5";
  bool check = false;
  std::string x_range = "-200:200", t_range = "-10:10";
  long nx = 41, nt = 21;
  long prec = 128;
  std::vector<std::string> k_for;
  std::string format = "json", out;
};

int run_envelope(const EnvelopeArgs& a) {
  mpq_class eps = parse_rational(a.eps);
  Precision p{a.prec};
  EnvelopeCertificate cert = envelope_constants(eps, p);

  json doc = doc_skeleton("envelope", json{{"eps", a.eps},
                                           {"check", a.check},
                                           {"x_range", a.x_range},
                                           {"t_range", a.t_range},
                                           {"nx", a.nx},
                                           {"nt", a.nt},
                                           {"prec", a.prec}});
  json certificate{{"B1", ball_json(cert.B1)}, {"B2", ball_json(cert.B2)},
                   {"B3", ball_json(cert.B3)}, {"A1", ball_json(cert.A1)},
                   {"A2", ball_json(cert.A2)}};
  for (const std::string& xs : a.k_for) {
    mpq_class x = parse_rational(xs);
    certificate["K"][xs] = choose_K(eps, x);
  }
  doc["results"].push_back(json{{"certificate", certificate}});

  bool ok = true;
  std::string csv = "x,t,ratio_mid,ratio_rad\n";
  if (a.check) {
    auto [xlo, xhi] = parse_range(a.x_range);
    auto [tlo, thi] = parse_range(a.t_range);
    EnvelopeCheckResult r = envelope_check(eps, cert, xlo, xhi, a.nx, tlo, thi,
                                           a.nt, p, a.format == "csv");
    ok = r.passed;
    doc["results"].push_back(json{{"check",
                                   {{"passed", r.passed},
                                    {"points", r.points},
                                    {"max_ratio", ball_json(r.max_ratio)},
                                    {"worst_x", r.worst_x.get_str()},
                                    {"worst_t", r.worst_t.get_str()}}}});
    for (const auto& [pt, ratio] : r.rows) {
      DecimalBall rb = serialize_ball(ratio);
      csv += csv_join({pt.first.get_str(), pt.second.get_str(), rb.mid, rb.rad}) + "\n";
    }
  }
  doc["certified"] = ok;
  OutputSink sink{a.out};
  sink.write(a.format == "csv" && a.check ? csv : dump(doc));
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct ResidualArgs {
  std::string solution = "u1", eps;
  std::string x_range = "0:2", t_range = "-1:1";
  long nx = 5, nt = 5;
  std::string h = "1e-3";
  long prec = 128;
  bool halve_check = false;
  std::string format = "json", out;
};

int run_residual(const ResidualArgs& a) {
  SolutionId id = solution_from(a.solution, a.eps);
  auto [xlo, xhi] = parse_range(a.x_range);
  auto [tlo, thi] = parse_range(a.t_range);
  mpq_class h = parse_rational(a.h);

  bool identity = per_term_heat_identity(64);
  ResidualResult r = residual_check(id, xlo, xhi, a.nx, tlo, thi, a.nt, h, a.prec);

  json doc = doc_skeleton("residual", json{{"solution", a.solution},
                                           {"eps", a.eps},
                                           {"x_range", a.x_range},
                                           {"t_range", a.t_range},
                                           {"nx", a.nx},
                                           {"nt", a.nt},
                                           {"h", a.h},
                                           {"prec", a.prec}});
  json body{{"per_term_identity_k64", identity},
            {"max_residual", ball_json(r.max_residual)},
            {"fd_error_budget", ball_json(r.fd_error_budget)},
            {"points", static_cast<long>(r.points.size())},
            {"skipped", r.skipped}};
  bool within = !certainly_less(r.fd_error_budget, r.max_residual);
  body["within_budget"] = within;
  if (a.halve_check) {
    ResidualResult r2 =
        residual_check(id, xlo, xhi, a.nx, tlo, thi, a.nt, h / 2, a.prec);
    Precision p{a.prec};
    Ball ratio = div(r.max_residual, r2.max_residual, p);
    body["halved_max_residual"] = ball_json(r2.max_residual);
    body["h_ratio"] = ball_json(ratio);
  }
  doc["results"].push_back(body);
  bool ok = identity && within;
  doc["certified"] = ok;

  OutputSink sink{a.out};
  if (a.format == "csv") {
    std::string csv = "x,t,residual_mid,residual_rad\n";
    for (const auto& pt : r.points) {
      DecimalBall rb = serialize_ball(pt.residual);
      csv += csv_join({pt.x.get_str(), pt.t.get_str(), rb.mid, rb.rad}) + "\n";
    }
    sink.write(csv);
  } else {
    sink.write(dump(doc));
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct WalczakArgs {
  std::string x0 = "0", delta0 = "0.5", A = "1";
  long nmax = 40;
  std::string t_list = "3/2,2,5,20,100";
  bool check_halving = false;
  long prec = 128;
  std::string out;
};

int run_walczak(const WalczakArgs& a) {
  mpq_class x0 = parse_rational(a.x0);
  mpq_class d0 = parse_rational(a.delta0);
  mpq_class A = parse_rational(a.A);
  std::vector<mpq_class> grid;
  std::stringstream ss(a.t_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) grid.push_back(parse_rational(tok));
  Precision p{a.prec};

  WalczakCheck w = walczak_hypothesis_check(x0, d0, A, a.nmax, grid, p);
  json doc = doc_skeleton("walczak", json{{"x0", a.x0},
                                          {"delta0", a.delta0},
                                          {"A", a.A},
                                          {"nmax", a.nmax},
                                          {"t_list", a.t_list},
                                          {"prec", a.prec}});
  json body{{"sup_observed", ball_json(w.sup_observed)},
            {"L_candidate", ball_json(w.L)},
            {"passed", w.passed}};
  bool ok = w.passed;
  if (a.check_halving) {
    WalczakCheck wh = walczak_hypothesis_check(x0, d0 / 2, A, a.nmax, grid, p);
    bool non_increasing = !certainly_less(w.sup_observed, wh.sup_observed);
    body["halved_sup"] = ball_json(wh.sup_observed);
    body["halving_non_increasing"] = non_increasing;
    ok = ok && non_increasing;
  }
  doc["results"].push_back(body);
  doc["certified"] = ok;
  OutputSink sink{a.out};
  sink.write(dump(doc));
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string input, kind = "coeff-root", out = "plot.svg";
};

int run_plot(const PlotArgs& a) {
  std::ifstream f(a.input);
  if (!f) throw domain_error("cannot read CSV input: " + a.input);
  std::string header;
  if (!std::getline(f, header)) throw domain_error("empty CSV: " + a.input);
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<long>(i);
    throw domain_error("CSV is missing column: " + name);
  };

  std::string xcol, ycol, title, xlabel, ylabel;
  if (a.kind == "coeff-root") {
    xcol = "n";
    ycol = "root_log10";
    title = "Taylor coefficient root growth";
    xlabel = "derivative order n";
    ylabel = "log10 (|h^(n)|/n!)^(1/n)";
  } else {
    xcol = "x";
    ycol = "ratio_mid";
    title = "Growth-envelope ratio";
    xlabel = "x";
    ylabel = "|w_eps| exp(-A2 |x|^(1+1/eps))";
  }
  long xi = col_index(xcol), yi = col_index(ycol);

  SvgSeries series{ycol, {}};
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (static_cast<long>(cells.size()) <= std::max(xi, yi)) continue;
    try {
      double x = std::stod(cells[static_cast<std::size_t>(xi)]);
      double y = std::stod(cells[static_cast<std::size_t>(yi)]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      series.points.push_back({x, y});
    } catch (...) {
      continue;  // non-numeric row (absent data point)
    }
  }
  write_svg_chart(a.out, title, xlabel, ylabel, {series});
  std::cout << "wrote " << a.out << " (" << series.points.size() << " points)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  ensure_numeric_env();
  CLI::App app{"certified evaluation and proof replay for nowhere-time-analytic heat solutions"};
  app.require_subcommand(1);

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a solution at a point (or random points)");
  eval_cmd->add_option("--solution", ea.solution)->check(CLI::IsMember({"u1", "u2", "weps"}));
  eval_cmd->add_option("--eps", ea.eps);
  eval_cmd->add_option("--x", ea.x);
  eval_cmd->add_option("--t", ea.t);
  eval_cmd->add_option("--prec", ea.prec);
  eval_cmd->add_option("--target-rad", ea.target_rad);
  eval_cmd->add_option("--random-points", ea.random_points);
  eval_cmd->add_option("--x-range", ea.x_range);
  eval_cmd->add_option("--t-range", ea.t_range);
  eval_cmd->add_option("--seed", ea.seed);
  eval_cmd->add_option("--format", ea.format)->check(CLI::IsMember({"json", "csv"}));
  eval_cmd->add_option("--out", ea.out);

  DerivArgs da;
  auto* deriv_cmd = app.add_subcommand("derivative", "closed-form time derivative at a point");
  deriv_cmd->add_option("--solution", da.solution)->check(CLI::IsMember({"u1", "u2", "weps"}));
  deriv_cmd->add_option("--eps", da.eps);
  deriv_cmd->add_option("--n", da.n);
  deriv_cmd->add_option("--x0", da.x0);
  deriv_cmd->add_option("--t0", da.t0);
  deriv_cmd->add_option("--prec", da.prec);
  deriv_cmd->add_option("--format", da.format)->check(CLI::IsMember({"json", "csv"}));
  deriv_cmd->add_option("--out", da.out);

  TaylorArgs ta;
  auto* taylor_cmd = app.add_subcommand("taylor", "Taylor coefficient roots (|h^(n)|/n!)^(1/n)");
  taylor_cmd->add_option("--solution", ta.solution)->check(CLI::IsMember({"u1", "u2", "weps"}));
  taylor_cmd->add_option("--eps", ta.eps);
  taylor_cmd->add_option("--x0", ta.x0);
  taylor_cmd->add_option("--t0", ta.t0);
  taylor_cmd->add_option("--n-from", ta.n_from);
  taylor_cmd->add_option("--n-to", ta.n_to);
  taylor_cmd->add_option("--format", ta.format)->check(CLI::IsMember({"json", "csv"}));
  taylor_cmd->add_option("--out", ta.out);

  ReplayArgs ra;
  auto* replay_cmd = app.add_subcommand("proof-replay", "m_N, dominance, and derivative lower bounds");
  replay_cmd->add_option("--solution", ra.solution)->check(CLI::IsMember({"u1", "weps"}));
  replay_cmd->add_option("--eps", ra.eps);
  replay_cmd->add_option("--x0", ra.x0);
  replay_cmd->add_option("--t0", ra.t0s, "replay point(s); default 0, 1, sqrt2");
  replay_cmd->add_option("--nmax", ra.nmax);
  replay_cmd->add_option("--format", ra.format)->check(CLI::IsMember({"json", "csv"}));
  replay_cmd->add_option("--out", ra.out);

  EnvelopeArgs ena;
  auto* env_cmd = app.add_subcommand("envelope", "growth-envelope certificate and grid check");
  env_cmd->add_option("--eps", ena.eps);
  env_cmd->add_flag("--check", ena.check);
  env_cmd->add_option("--x-range", ena.x_range);
  env_cmd->add_option("--t-range", ena.t_range);
  env_cmd->add_option("--nx", ena.nx);
  env_cmd->add_option("--nt", ena.nt);
  env_cmd->add_option("--prec", ena.prec);
  env_cmd->add_option("--k-for", ena.k_for, "report choose_K at these x values");
  env_cmd->add_option("--format", ena.format)->check(CLI::IsMember({"json", "csv"}));
  env_cmd->add_option("--out", ena.out);

  ResidualArgs rsa;
  auto* res_cmd = app.add_subcommand("residual", "central-FD heat residual on a cell-centered grid");
  res_cmd->add_option("--solution", rsa.solution)->check(CLI::IsMember({"u1", "u2", "weps"}));
  res_cmd->add_option("--eps", rsa.eps);
  res_cmd->add_option("--x-range", rsa.x_range);
  res_cmd->add_option("--t-range", rsa.t_range);
  res_cmd->add_option("--nx", rsa.nx);
  res_cmd->add_option("--nt", rsa.nt);
  res_cmd->add_option("--step", rsa.h, "FD step h");
  res_cmd->add_option("--prec", rsa.prec);
  res_cmd->add_flag("--halve-check", rsa.halve_check);
  res_cmd->add_option("--format", rsa.format)->check(CLI::IsMember({"json", "csv"}));
  res_cmd->add_option("--out", rsa.out);

  WalczakArgs wa;
  auto* wal_cmd = app.add_subcommand("walczak", "condensation-lemma hypothesis data");
  wal_cmd->add_option("--x0", wa.x0);
  wal_cmd->add_option("--delta0", wa.delta0);
  wal_cmd->add_option("--A", wa.A);
  wal_cmd->add_option("--nmax", wa.nmax);
  wal_cmd->add_option("--t-list", wa.t_list);
  wal_cmd->add_flag("--check-halving", wa.check_halving);
  wal_cmd->add_option("--prec", wa.prec);
  wal_cmd->add_option("--out", wa.out);

  PlotArgs pa;
  auto* plot_cmd = app.add_subcommand("plot", "render a prior CSV as an SVG chart");
  plot_cmd->add_option("--input", pa.input)->required();
  plot_cmd->add_option("--kind", pa.kind)->check(CLI::IsMember({"coeff-root", "envelope"}));
  plot_cmd->add_option("--out", pa.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "ERROR EUSAGE: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*eval_cmd) return run_eval(ea);
    if (*deriv_cmd) return run_derivative(da);
    if (*taylor_cmd) return run_taylor(ta);
    if (*replay_cmd) return run_proof_replay(ra);
    if (*env_cmd) return run_envelope(ena);
    if (*res_cmd) return run_residual(rsa);
    if (*wal_cmd) return run_walczak(wa);
    if (*plot_cmd) return run_plot(pa);
  } catch (const domain_error& e) {
    std::cerr << "ERROR EDOMAIN: " << e.what() << "\n";
    return kExitUsage;
  } catch (const undecidable_error& e) {
    std::cerr << "ERROR EUNDECIDABLE: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const precision_cap_error& e) {
    std::cerr << "ERROR EPREC: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "ERROR EINTERNAL: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
