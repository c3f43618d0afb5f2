#include <doctest.h>

#include "uep/profile_io.hpp"

using namespace uep;

TEST_CASE("canonical text round trips byte for byte") {
  ProfileDocument doc;
  doc.set_meta("n", "4096");
  doc.global_lambda = EdgeDistribution{{2, 0.213}, {3, 0.0927}, {30, 0.0946}};
  ClassSection c;
  c.lambda = {{3, 0.1 + 0.2}, {4, 0.7}};
  c.nodes = {{3, 485}, {4, 1153}};
  c.rho = {{2, 0.35}, {3, 0.35}, {4, 1.0 / 3.0}};
  doc.classes[1] = c;
  doc.check_types[{3, 4, 2}] = 0.125;
  doc.check_types[{7, 0, 2}] = 1e-17;
  doc.provenance.emplace_back("sigma2_design", "0.8017");

  const auto text = profile_to_string(doc);
  const auto back = parse_profile_string(text);
  CHECK(profile_to_string(back) == text);
  CHECK(back.classes.at(1).rho.at(4) == 1.0 / 3.0);
  CHECK(back.classes.at(1).lambda.at(3) == 0.1 + 0.2);
  CHECK(back.check_types.at({7, 0, 2}) == 1e-17);
  CHECK(*back.meta_value("n") == "4096");
}

TEST_CASE("reals print in shortest round-tripping form") {
  CHECK(format_real(0.2) == "0.2");
  CHECK(format_real(0.1 + 0.2) == "0.30000000000000004");
  CHECK(format_real(1.0) == "1");
}

TEST_CASE("parse errors carry line numbers") {
  const std::string bad = "[class 1]\nlambda = 3:0.5 4:x\n";
  try {
    parse_profile_string(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_profile_string("[class 1]\nrho = 2:0.5 2:0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_profile_string("[nonsense\n"), ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
  const auto doc = parse_profile_string("# header\n\n[global]\n# inner\nlambda = 2:1\n");
  REQUIRE(doc.global_lambda);
  CHECK(doc.global_lambda->at(2) == 1.0);
}
