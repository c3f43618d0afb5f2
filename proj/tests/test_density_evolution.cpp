#include <doctest.h>

#include <cmath>

#include "uep/density_evolution.hpp"
#include "uep/jfunction.hpp"
#include "uep/optimizer.hpp"
#include "uep/pipeline.hpp"

using namespace uep;

namespace {

mi::DeInputs regular36() {
  const auto p = opt::DesignProblem::from_counts({{{3, 2000}}}, 1000, 6);
  return opt::de_inputs(p, TypeDistribution{{{6}, 1.0}});
}

// the same code with its variables split into two identical classes
mi::DeInputs regular36_split() {
  const auto p = opt::DesignProblem::from_counts({{{3, 1000}}, {{3, 1000}}}, 1000, 6);
  return opt::de_inputs(p, TypeDistribution{{{3, 3}, 1.0}});
}

}  // namespace

TEST_CASE("(3,6)-regular threshold matches an independent evaluation") {
  // 0.88069..0.88076 from a separate scipy implementation of the same recursion
  const double t = mi::threshold_search(regular36(), 0.5, 1.2, 1e-5, 400);
  CHECK(std::abs(t - 0.8807) < 5e-4);
}

TEST_CASE("splitting a class into identical halves changes nothing") {
  const double a = mi::threshold_search(regular36(), 0.5, 1.2, 1e-5, 400);
  const double b = mi::threshold_search(regular36_split(), 0.5, 1.2, 1e-5, 400);
  CHECK(std::abs(a - b) < 2e-5);
  const auto tr = mi::de_run(regular36_split(), 0.7 * 0.7, 400);
  REQUIRE(tr.converged);
  for (const auto& r : tr.records) CHECK(r.iv[0] == doctest::Approx(r.iv[1]).epsilon(1e-12));
}

TEST_CASE("DE converges below the threshold and stalls above it") {
  const auto in = regular36();
  CHECK(mi::de_run(in, 0.85 * 0.85, 400).converged);
  const auto above = mi::de_run(in, 0.92 * 0.92, 400);
  CHECK_FALSE(above.converged);
  // MI never decreases along the trajectory
  for (std::size_t l = 1; l < above.records.size(); ++l) CHECK(above.records[l].iv[0] >= above.records[l - 1].iv[0] - 1e-12);
}

TEST_CASE("variable update of a regular node") {
  // dv = 1 passes the channel through: J(2 / sigma)
  const double s2 = 0.64;
  CHECK(mi::var_update_regular(s2, 1, 0.7) == doctest::Approx(mi::j_fun(2.0 / std::sqrt(s2))).epsilon(1e-9));
  const double x = mi::var_update_regular(s2, 3, 0.5);
  const double expect = mi::j_fun(std::sqrt(4.0 / s2 + 2.0 * std::pow(mi::j_inv(0.5), 2)));
  CHECK(x == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("class variable update inverse") {
  ClassLambda lam;
  lam.coeffs = {{2, 0.5}, {4, 0.5}};
  const double s2 = 0.8;
  for (double target : {0.6, 0.8, 0.95}) {
    const double ic = mi::var_update_class_inverse(s2, lam, target);
    CAPTURE(target);
    if (ic > 0.0 && ic <= 1.0) CHECK(mi::var_update_class(s2, lam, ic) == doctest::Approx(target).epsilon(1e-6));
  }
  CHECK(mi::var_update_class_inverse(s2, lam, 0.01) == 0.0);
}

TEST_CASE("check views from types and from aggregates agree on a single class") {
  TypeDistribution t{{{4}, 0.5}, {{6}, 0.5}};
  const auto v = mi::CheckProfileView::from_types(t, 0);
  const auto agg = v.aggregate();
  CHECK(agg.at(4) == doctest::Approx(0.4));
  CHECK(agg.at(6) == doctest::Approx(0.6));
  v.check();
}

TEST_CASE("the example ensemble with uniform connections") {
  const auto d = make_design(worked_example());
  const auto ds = opt::auto_design_sigma(d.problem, 1.0);
  CHECK(std::abs(ds.sigma_star - 0.93270) < 1e-3);
}
