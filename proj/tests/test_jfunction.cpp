#include <doctest.h>

#include <cmath>
#include <random>

#include "uep/jfunction.hpp"

using namespace uep::mi;

namespace {

// J(sigma) by 30-digit quadrature, computed outside this code base
struct Golden {
  double sigma;
  double j;
};
const Golden kGolden[] = {
    {0.1, 0.0018011183354480802}, {0.5, 0.043729962944309451}, {1.0, 0.16074721979641687},
    {1.6363, 0.36493558090791821}, {2.0, 0.48594415413293532}, {3.0, 0.75997900777123096},
    {5.0, 0.97517900431324406},   {8.0, 0.99986505740822632},
};

}  // namespace

TEST_CASE("quadrature matches frozen golden values") {
  for (const auto& g : kGolden) {
    CAPTURE(g.sigma);
    CHECK(std::abs(j_fun_quadrature(g.sigma) - g.j) < 1e-9);
  }
}

TEST_CASE("table-backed J matches golden values to 1e-7") {
  for (const auto& g : kGolden) {
    CAPTURE(g.sigma);
    CHECK(std::abs(j_fun(g.sigma) - g.j) < 1e-7);
  }
}

TEST_CASE("j_inv inverts j_fun on 1000 points") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    worst = std::max(worst, std::abs(j_fun(j_inv(x)) - x));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("J is increasing with limits 0 and 1") {
  CHECK(j_fun(0.0) == 0.0);
  CHECK(j_fun(50.0) == 1.0);
  double prev = 0.0;
  for (double s = 0.05; s < 12.0; s += 0.05) {
    const double v = j_fun(s);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(j_inv(0.0) == 0.0);
  CHECK(std::isfinite(j_inv(1.0)));
}

TEST_CASE("derivative agrees with a finite difference") {
  for (double s : {0.3, 1.0, 2.5, 6.0}) {
    const double h = 1e-4;
    const double fd = (j_fun_quadrature(s + h) - j_fun_quadrature(s - h)) / (2 * h);
    CHECK(j_derivative_quadrature(s) == doctest::Approx(fd).epsilon(1e-6));
  }
}
