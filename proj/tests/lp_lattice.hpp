#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "uep/simplex.hpp"

namespace lattice {

using namespace uep::lp;

// All compositions of `total` lattice units into `parts` non-negative parts.
inline void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

// Two-class profile LP on checks of degree <= dc:
//   min c1.r1 + c2.r2,  sum r1 = sum r2 = 1,  r_j,s <= cap_j,  r1_s + r2_s <= u_s.
// The constraint matrix is a network matrix, so with lattice-valued caps
// every vertex is a lattice point and a lattice scan finds the optimum.
struct ProfileInstance {
  int dc;
  int units;  // lattice points per unit
  std::vector<double> c1, c2;
  int cap1, cap2;
  std::vector<int> u;
};

inline LinearProgram to_lp(const ProfileInstance& in) {
  const int d = in.dc;
  const double step = 1.0 / in.units;
  LinearProgram lp;
  lp.objective = in.c1;
  lp.objective.insert(lp.objective.end(), in.c2.begin(), in.c2.end());
  std::vector<double> row(2 * d, 0.0);
  for (int s = 0; s < d; ++s) row[s] = 1.0;
  lp.add(row, Sense::Equal, 1.0, "sum1");
  std::fill(row.begin(), row.end(), 0.0);
  for (int s = 0; s < d; ++s) row[d + s] = 1.0;
  lp.add(row, Sense::Equal, 1.0, "sum2");
  for (int s = 0; s < d; ++s) {
    std::fill(row.begin(), row.end(), 0.0);
    row[s] = 1.0;
    lp.add(row, Sense::LessEqual, in.cap1 * step, "cap");
    std::fill(row.begin(), row.end(), 0.0);
    row[d + s] = 1.0;
    lp.add(row, Sense::LessEqual, in.cap2 * step, "cap");
    std::fill(row.begin(), row.end(), 0.0);
    row[s] = row[d + s] = 1.0;
    lp.add(row, Sense::LessEqual, in.u[s] * step, "shared");
  }
  return lp;
}

inline double lattice_min(const ProfileInstance& in) {
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(in.units, in.dc, cur, comps);
  const double step = 1.0 / in.units;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : comps) {
    bool ok = true;
    double va = 0.0;
    for (int s = 0; s < in.dc && ok; ++s) {
      ok = a[s] <= in.cap1 && a[s] <= in.u[s];
      va += in.c1[s] * a[s] * step;
    }
    if (!ok) continue;
    for (const auto& b : comps) {
      double v = va;
      bool okb = true;
      for (int s = 0; s < in.dc; ++s) {
        if (b[s] > in.cap2 || a[s] + b[s] > in.u[s]) {
          okb = false;
          break;
        }
        v += in.c2[s] * b[s] * step;
      }
      if (okb) best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace lattice
