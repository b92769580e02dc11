#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "nwheat/exact_real.hpp"
#include "nwheat/rational_enum.hpp"
#include "support.hpp"

using namespace nwheat;
using testutil::P;

TEST_CASE("enumeration start is fixed: 0, 1, -1, 1/2") {
  REQUIRE(enumerate_rational(1) == 0);
  REQUIRE(enumerate_rational(2) == 1);
  REQUIRE(enumerate_rational(3) == -1);
  REQUIRE(enumerate_rational(4) == mpq_class(1, 2));
  REQUIRE(enumerate_rational(5) == mpq_class(-1, 2));
  REQUIRE(enumerate_rational(6) == 2);
}

TEST_CASE("Calkin-Wilf order matches the independent successor recurrence") {
  // q_{n+1} = 1 / (2 floor(q_n) - q_n + 1), starting from q_1 = 1.
  mpq_class q = 1;
  for (unsigned long i = 1; i <= 5000; ++i) {
    REQUIRE(calkin_wilf(i) == q);
    mpz_class fl = q.get_num() / q.get_den();  // exact floor for q > 0
    q = 1 / (2 * mpq_class(fl) - q + 1);
  }
}

TEST_CASE("first 10^4 enumerated rationals are distinct and targets appear") {
  std::set<mpq_class> seen;
  for (unsigned long k = 1; k <= 10000; ++k) {
    auto [it, fresh] = seen.insert(enumerate_rational(k));
    REQUIRE(fresh);
  }
  // Bounded search finds specific targets.
  auto find_index = [](const mpq_class& target, unsigned long limit) {
    for (unsigned long k = 1; k <= limit; ++k)
      if (enumerate_rational(k) == target) return k;
    return 0UL;
  };
  REQUIRE(find_index(mpq_class(3, 5), 100000) > 0);
  REQUIRE(find_index(mpq_class(-7, 2), 100000) > 0);
  REQUIRE(find_index(mpq_class(1, 2), 10) == 4);
}

TEST_CASE("decimal and fraction literals parse to exact rationals") {
  REQUIRE(parse_rational("2.5") == mpq_class(5, 2));
  REQUIRE(parse_rational("-1e-3") == mpq_class(-1, 1000));
  REQUIRE(parse_rational("0.1536867") == mpq_class(1536867, 10000000));
  REQUIRE(parse_rational("5/2") == mpq_class(5, 2));
  REQUIRE(parse_rational("100") == 100);
  REQUIRE_THROWS_AS(parse_rational("abc"), domain_error);
}

TEST_CASE("exact sqrt scalars evaluate to certified balls") {
  ExactReal s2 = ExactReal::parse("sqrt2");
  REQUIRE_FALSE(s2.is_rational());
  Ball b = s2.to_ball(P(128));
  REQUIRE(testutil::encloses_literal(b, 1.4142135623730951));
  Ball sq = mul(b, b, P(128));
  REQUIRE(testutil::encloses_literal(sq, 2.0));
  REQUIRE(ExactReal::parse("-sqrt(2)").sign() == -1);
  REQUIRE(ExactReal::parse("7/4").rational() == mpq_class(7, 4));
}
