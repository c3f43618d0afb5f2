#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lp_lattice.hpp"
#include "uep/simplex.hpp"

using namespace uep::lp;
using lattice::ProfileInstance;
using lattice::lattice_min;
using lattice::to_lp;

namespace {

// Solve A x = b by Gaussian elimination; false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Minimum over all basic feasible points (constraints plus x >= 0).
double vertex_min(const LinearProgram& lp, bool& any) {
  const int n = lp.variables();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& r : lp.rows) {
    rows.push_back(r.coeffs);
    rhs.push_back(r.rhs);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
  }
  const int total = static_cast<int>(rows.size());
  double best = std::numeric_limits<double>::infinity();
  any = false;
  std::vector<int> pick(n);
  // every n-subset of the constraint set
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i = 0; i < total; ++i) {
      if (mask[i]) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
    }
    std::vector<double> x;
    if (!solve_square(a, b, x)) continue;
    bool feasible = true;
    for (double v : x) feasible &= v >= -1e-9;
    for (std::size_t r = 0; r < lp.rows.size() && feasible; ++r) {
      double lhs = 0.0;
      for (int i = 0; i < n; ++i) lhs += lp.rows[r].coeffs[i] * x[i];
      switch (lp.rows[r].sense) {
        case Sense::LessEqual: feasible = lhs <= lp.rows[r].rhs + 1e-9; break;
        case Sense::GreaterEqual: feasible = lhs >= lp.rows[r].rhs - 1e-9; break;
        case Sense::Equal: feasible = std::abs(lhs - lp.rows[r].rhs) <= 1e-9; break;
      }
    }
    if (!feasible) continue;
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += lp.objective[i] * x[i];
    best = std::min(best, v);
    any = true;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace

TEST_CASE("simplex matches a brute-force lattice scan on two-class profile LPs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> cost(-1.0, 3.0);
  int solved = 0, infeasible = 0;
  for (int t = 0; t < 40; ++t) {
    ProfileInstance in;
    in.dc = 2 + t % 4;  // 2..5
    in.units = in.dc == 5 ? 10 : 20;
    std::uniform_int_distribution<int> capd(in.units / in.dc, in.units);
    in.cap1 = capd(rng);
    in.cap2 = capd(rng);
    std::uniform_int_distribution<int> ud(in.units / 3, 2 * in.units);
    for (int s = 0; s < in.dc; ++s) {
      in.c1.push_back(std::round(cost(rng) * 8) / 8 + s);
      in.c2.push_back(cost(rng) + 0.5 * s);
      in.u.push_back(ud(rng));
    }
    const auto sol = solve(to_lp(in));
    const double ref = lattice_min(in);
    CAPTURE(t);
    if (std::isinf(ref)) {
      CHECK(sol.status == Status::Infeasible);
      ++infeasible;
    } else {
      REQUIRE(sol.status == Status::Optimal);
      CHECK(std::abs(sol.objective - ref) <= 1e-9);
      ++solved;
    }
  }
  CHECK(solved >= 20);
  MESSAGE("feasible " << solved << ", infeasible " << infeasible);
}

TEST_CASE("simplex matches vertex enumeration on random dense LPs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int agreed = 0;
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + t % 4;
    LinearProgram lp;
    for (int i = 0; i < n; ++i) lp.objective.push_back(u(rng));
    // a box keeps every instance bounded
    std::vector<double> ones(n, 1.0);
    lp.add(ones, Sense::LessEqual, 2.0 + u(rng), "box");
    const int m = 1 + t % 3;
    for (int r = 0; r < m; ++r) {
      std::vector<double> a(n);
      for (auto& x : a) x = u(rng);
      const Sense s = r % 3 == 0 ? Sense::GreaterEqual : (r % 3 == 1 ? Sense::LessEqual : Sense::Equal);
      lp.add(a, s, 0.3 * u(rng), "r");
    }
    bool any = false;
    const double ref = vertex_min(lp, any);
    const auto sol = solve(lp);
    CAPTURE(t);
    if (!any) {
      CHECK(sol.status == Status::Infeasible);
    } else {
      REQUIRE(sol.status == Status::Optimal);
      CHECK(std::abs(sol.objective - ref) <= 1e-9);
      ++agreed;
    }
  }
  CHECK(agreed >= 30);
}

TEST_CASE("infeasible programs name the blocking family") {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.add({1.0, 1.0}, Sense::Equal, 1.0, "sum");
  lp.add({1.0, 0.0}, Sense::LessEqual, 0.2, "cap");
  lp.add({0.0, 1.0}, Sense::LessEqual, 0.2, "cap");
  const auto sol = solve(lp);
  CHECK(sol.status == Status::Infeasible);
  CHECK(sol.infeasibility > 0.5);
  CHECK_FALSE(sol.blocking.empty());
}

TEST_CASE("unbounded programs are reported") {
  LinearProgram lp;
  lp.objective = {-1.0, 0.0};
  lp.add({1.0, -1.0}, Sense::LessEqual, 1.0);
  CHECK(solve(lp).status == Status::Unbounded);
}

TEST_CASE("degenerate programs terminate") {
  // many ties; Bland's rule must not cycle
  LinearProgram lp;
  lp.objective = {-0.75, 150.0, -0.02, 6.0};
  lp.add({0.25, -60.0, -0.04, 9.0}, Sense::LessEqual, 0.0);
  lp.add({0.5, -90.0, -0.02, 3.0}, Sense::LessEqual, 0.0);
  lp.add({0.0, 0.0, 1.0, 0.0}, Sense::LessEqual, 1.0);
  const auto sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.05));
}
