#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

using nlohmann::json;

std::string binary_path() {
  const char* p = std::getenv("NWHEAT_BIN");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = binary_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

RunResult run_stderr(const std::string& args) {
  std::string cmd = binary_path() + " " + args + " 2>&1 1>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("eval at the origin returns an exact zero and exit 0") {
  RunResult r = run("eval --solution u1 --x 0 --t 0 --prec 128");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  REQUIRE(doc["schema_version"] == 1);
  REQUIRE(doc["command"] == "eval");
  REQUIRE(doc["results"][0]["value"]["mid"] == "0");
  REQUIRE(doc["certified"] == true);
}

TEST_CASE("byte-identical output on repeated invocation") {
  const std::string cmd =
      "eval --solution u2 --x 1/3 --t 0.7 --target-rad 1e-30";
  RunResult a = run(cmd), b = run(cmd);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);

  RunResult c = run("derivative --solution weps --eps 0.5 --n 2 --x0 1 --t0 1");
  RunResult d = run("derivative --solution weps --eps 0.5 --n 2 --x0 1 --t0 1");
  REQUIRE(c.out == d.out);
}

TEST_CASE("seeded random grids reproduce and differ across seeds") {
  RunResult a = run("eval --solution u1 --random-points 5 --seed 7 --format csv");
  RunResult b = run("eval --solution u1 --random-points 5 --seed 7 --format csv");
  RunResult c = run("eval --solution u1 --random-points 5 --seed 8 --format csv");
  REQUIRE(a.out == b.out);
  REQUIRE(a.out != c.out);
}

TEST_CASE("usage and domain violations exit 2 with the stable error prefix") {
  RunResult r = run_stderr("eval --solution u9");
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.out.rfind("ERROR E", 0) == 0);

  RunResult d = run_stderr("eval --solution u1 --x -1 --t 0");
  REQUIRE(d.exit_code == 2);
  REQUIRE(d.out.rfind("ERROR EDOMAIN:", 0) == 0);

  RunResult w = run_stderr("eval --solution weps --x 0 --t 0");
  REQUIRE(w.exit_code == 2);  // weps without --eps
}

TEST_CASE("proof-replay emits N0 and passing rows") {
  RunResult r = run("proof-replay --solution u1 --x0 0 --t0 0 --nmax 8");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  REQUIRE(doc["results"][0]["N0"] == 6);
  bool saw_row = false;
  for (std::size_t i = 1; i < doc["results"].size(); ++i) {
    REQUIRE(doc["results"][i]["dominance"] == true);
    REQUIRE(doc["results"][i]["lower_bound_ok"] == true);
    saw_row = true;
  }
  REQUIRE(saw_row);
}

TEST_CASE("envelope certificate carries the derived constants") {
  RunResult r = run("envelope --eps 0.5 --k-for 200");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  auto cert = doc["results"][0]["certificate"];
  REQUIRE(cert["K"]["200"] == 14);
  std::string b2 = cert["B2"]["mid"];
  REQUIRE(b2.substr(0, 6) == "1.1964");
  std::string b3 = cert["B3"]["mid"];
  REQUIRE(b3.substr(0, 6) == "1.0065");
  REQUIRE(cert["A2"]["mid"] == cert["B2"]["mid"]);
}

TEST_CASE("residual subcommand reports budget compliance") {
  RunResult r = run("residual --solution u1 --nx 3 --nt 3 --step 1e-3");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  REQUIRE(doc["results"][0]["per_term_identity_k64"] == true);
  REQUIRE(doc["results"][0]["within_budget"] == true);
}

TEST_CASE("CSV output has the documented headers") {
  RunResult r = run("eval --solution u1 --x 1 --t 1 --format csv");
  REQUIRE(r.out.rfind("solution,eps,x,t,mid,rad,terms_used,tail_bound,target_met\n", 0) == 0);
  RunResult t = run("taylor --solution u1 --x0 0 --t0 0 --n-from 1 --n-to 3 --format csv");
  REQUIRE(t.out.rfind("solution,eps,x0,t0,n,sign,logmag_mid,logmag_rad,root_log10\n", 0) == 0);
}

TEST_CASE("taylor CSV feeds the plot subcommand") {
  std::string csv = "/tmp/nwheat_cli_test_roots.csv";
  std::string svg = "/tmp/nwheat_cli_test_roots.svg";
  RunResult t = run("taylor --solution u1 --x0 0 --t0 0 --n-from 1 --n-to 7 "
                    "--format csv --out " + csv);
  REQUIRE(t.exit_code == 0);
  RunResult plot = run("plot --input " + csv + " --kind coeff-root --out " + svg);
  REQUIRE(plot.exit_code == 0);
  std::ifstream f(svg);
  REQUIRE(f.good());
  std::string content((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
  REQUIRE(content.find("<svg") != std::string::npos);
  REQUIRE(content.find("polyline") != std::string::npos);
  std::remove(csv.c_str());
  std::remove(svg.c_str());
}

TEST_CASE("decimal round-trip keeps the certificate valid") {
  // Parse the serialized mid/rad back and check the original midpoint is
  // inside the reconstructed interval.
  RunResult r = run("eval --solution u2 --x 0 --t 0.5 --target-rad 1e-30");
  json doc = json::parse(r.out);
  std::string mid = doc["results"][0]["value"]["mid"];
  std::string rad = doc["results"][0]["value"]["rad"];
  long double m = std::strtold(mid.c_str(), nullptr);
  long double rd = std::strtold(rad.c_str(), nullptr);
  RunResult hi = run("eval --solution u2 --x 0 --t 0.5 --target-rad 1e-40 --prec 256");
  json doc2 = json::parse(hi.out);
  long double m2 = std::strtold(doc2["results"][0]["value"]["mid"].get<std::string>().c_str(), nullptr);
  REQUIRE(std::abs((double)(m - m2)) <= (double)rd + 1e-18);
}

TEST_CASE("NWHEAT_PREC_CAP caps the working precision") {
  std::string cmd = "env NWHEAT_PREC_CAP=64 " + binary_path() +
                    " eval --solution u1 --x 1 --t 1 --prec 128 2>&1 1>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  REQUIRE(WEXITSTATUS(status) != 0);
  REQUIRE(out.find("ERROR") == 0);
}
