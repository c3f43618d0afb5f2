#include <doctest.h>

#include "uep/manifest.hpp"
#include "uep/pipeline.hpp"

using namespace uep;

TEST_CASE("range and list parsing") {
  CHECK(parse_range("1:0.5:2") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(parse_range("0.3") == std::vector<double>{0.3});
  CHECK(parse_range("0:0.1:0.3").size() == 4);
  CHECK_THROWS_AS(parse_range("1:0:2"), DomainError);
  CHECK_THROWS_AS(parse_range("1:2"), DomainError);
  CHECK(parse_list("0.2,0.8") == std::vector<double>{0.2, 0.8});
  CHECK(join_list({0.2, 0.8}) == "0.2,0.8");
}

TEST_CASE("spec overrides from a document") {
  const auto doc = parse_profile_string("[meta]\nn = 1024\nk = 512\ninfo_fractions = 0.5,0.5\n[global]\nlambda = 2:1\n");
  const auto s = spec_from_document(doc, worked_example());
  CHECK(s.part.n == 1024);
  CHECK(s.part.k == 512);
  CHECK(s.dc == 9);
  CHECK(s.lambda == EdgeDistribution{{2, 1.0}});
  CHECK(s.part.info_fractions == std::vector<double>{0.5, 0.5});
}

TEST_CASE("profile documents carry what build-code needs") {
  const auto d = make_design(worked_example());
  opt::OptimizerConfig cfg;
  cfg.sigma2_design = opt::auto_design_sigma(d.problem).sigma2;
  cfg.max_rho[1] = 0.55;
  const auto r = opt::optimize_all(d.problem, cfg);
  const auto doc = profile_document(d, r, cfg);
  const auto back = parse_profile_string(profile_to_string(doc));
  CHECK(back.check_types == doc.check_types);
  CHECK(back.classes.at(1).rho == r.rho[1]);
  const auto s = spec_from_document(back);
  CHECK(s.part.n == 4096);
  CHECK(s.dc == 9);

  ProfileDocument empty;
  CHECK_THROWS_AS(build_code(empty, 0, 0.0, 1), code::ConstructionFailure);
}

TEST_CASE("manifest digests") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  RunManifest m;
  m.subcommand = "x";
  m.set("--a", "1");
  m.set("--a", "2");
  REQUIRE(m.config.size() == 1);
  CHECK(m.config[0].second == "2");
  CHECK(m.to_json().find("\"subcommand\": \"x\"") != std::string::npos);
}
