#include "uep/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace uep::lp {

void LinearProgram::add(std::vector<double> coeffs, Sense sense, double rhs, std::string tag) {
  if (static_cast<int>(coeffs.size()) != variables()) {
    throw std::invalid_argument("LinearProgram::add: coefficient count mismatch");
  }
  rows.push_back({std::move(coeffs), sense, rhs, std::move(tag)});
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, double tol) : tol_(tol), n_(lp.variables()), m_(lp.rows.size()) {
    // Normalize rows to non-negative right-hand sides.
    std::vector<Constraint> rows = lp.rows;
    for (auto& r : rows) {
      if (r.rhs < 0.0) {
        for (auto& c : r.coeffs) c = -c;
        r.rhs = -r.rhs;
        if (r.sense == Sense::LessEqual) {
          r.sense = Sense::GreaterEqual;
        } else if (r.sense == Sense::GreaterEqual) {
          r.sense = Sense::LessEqual;
        }
      }
    }
    std::size_t slacks = 0;
    std::size_t arts = 0;
    for (const auto& r : rows) {
      if (r.sense != Sense::Equal) ++slacks;
      if (r.sense != Sense::LessEqual) ++arts;
    }
    cols_ = n_ + slacks + arts;
    first_art_ = n_ + slacks;
    t_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m_, 0);
    tags_.resize(m_);
    std::size_t s = n_;
    std::size_t a = first_art_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      tags_[i] = r.tag;
      std::copy(r.coeffs.begin(), r.coeffs.end(), t_[i].begin());
      t_[i][cols_] = r.rhs;
      if (r.sense == Sense::LessEqual) {
        t_[i][s] = 1.0;
        basis_[i] = s++;
      } else if (r.sense == Sense::GreaterEqual) {
        t_[i][s++] = -1.0;
        t_[i][a] = 1.0;
        basis_[i] = a++;
      } else {
        t_[i][a] = 1.0;
        basis_[i] = a++;
      }
    }
  }

  bool is_artificial(std::size_t c) const { return c >= first_art_; }

  // Returns false when unbounded.
  bool optimize(const std::vector<double>& cost, bool allow_artificial) {
    for (int guard = 0; guard < 200000; ++guard) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        double r = cost[j];
        for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * t_[i][j];
        if (r < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_[i][enter] <= tol_) continue;
        const double ratio = t_[i][cols_] / t_[i][enter];
        if (ratio < best - tol_ || (ratio <= best + tol_ && leave < m_ && basis_[i] < basis_[leave])) {
          if (ratio < best) best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit reached");
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[row][j];
      t_[i][col] = 0.0;
    }
    basis_[row] = col;
  }

  // After phase one, swap zero-level artificials out of the basis.
  void purge_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (std::abs(t_[i][j]) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double value(const std::vector<double>& cost) const {
    double z = 0.0;
    for (std::size_t i = 0; i < m_; ++i) z += cost[basis_[i]] * t_[i][cols_];
    return z;
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, t_[i][cols_]);
    }
    return x;
  }

  std::vector<std::string> infeasible_tags() const {
    std::set<std::string> tags;
    for (std::size_t i = 0; i < m_; ++i) {
      if (is_artificial(basis_[i]) && t_[i][cols_] > tol_) tags.insert(tags_[i]);
    }
    return {tags.begin(), tags.end()};
  }

  std::size_t cols() const { return cols_; }
  std::size_t first_artificial() const { return first_art_; }

 private:
  double tol_;
  std::size_t n_;
  std::size_t m_;
  std::size_t cols_ = 0;
  std::size_t first_art_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<std::size_t> basis_;
  std::vector<std::string> tags_;
};

}  // namespace

Solution solve(const LinearProgram& lp, double tol) {
  Tableau tab(lp, tol);
  Solution sol;

  std::vector<double> phase1(tab.cols(), 0.0);
  for (std::size_t j = tab.first_artificial(); j < tab.cols(); ++j) phase1[j] = 1.0;
  tab.optimize(phase1, true);
  sol.infeasibility = tab.value(phase1);
  if (sol.infeasibility > 1e-9) {
    sol.status = Status::Infeasible;
    sol.blocking = tab.infeasible_tags();
    return sol;
  }
  tab.purge_artificials();

  std::vector<double> cost(tab.cols(), 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  if (!tab.optimize(cost, false)) {
    sol.status = Status::Unbounded;
    return sol;
  }
  sol.status = Status::Optimal;
  sol.x = tab.primal();
  sol.objective = 0.0;
  for (int j = 0; j < lp.variables(); ++j) sol.objective += lp.objective[j] * sol.x[j];
  for (const auto& r : lp.rows) {
    double lhs = 0.0;
    for (int j = 0; j < lp.variables(); ++j) lhs += r.coeffs[j] * sol.x[j];
    if (std::abs(lhs - r.rhs) <= 1e-9 && r.sense != Sense::Equal && !r.tag.empty()) {
      if (std::find(sol.blocking.begin(), sol.blocking.end(), r.tag) == sol.blocking.end()) {
        sol.blocking.push_back(r.tag);
      }
    }
  }
  return sol;
}

}  // namespace uep::lp
