#pragma once

#include <string>
#include <vector>

namespace uep::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string tag;  // constraint family, reported when it blocks feasibility
};

/// minimize objective . x  subject to rows, x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> rows;

  int variables() const { return static_cast<int>(objective.size()); }
  void add(std::vector<double> coeffs, Sense sense, double rhs, std::string tag = {});
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  double infeasibility = 0.0;  // phase-one residual when infeasible
  /// Tags of rows whose artificial variables could not be driven out
  /// (infeasible) or that are tight at the optimum.
  std::vector<std::string> blocking;
};

/// Two-phase dense primal simplex with Bland's rule. Ties are resolved toward
/// lower variable indices, so callers control the preferred optimum through
/// variable order.
Solution solve(const LinearProgram& lp, double tol = 1e-10);

std::string to_string(Status s);

}  // namespace uep::lp
