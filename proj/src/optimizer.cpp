#include "uep/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uep/jfunction.hpp"
#include "uep/simplex.hpp"

namespace uep::opt {

using mi::CheckProfileView;
using mi::CrossSplit;

ParityProfile fix_parity_profile(int parity_bits, const std::map<int, int>& parity_counts) {
  if (parity_bits < 1) throw DomainError("fix_parity_profile: need at least one parity bit");
  long total = 0;
  long extras = 0;
  for (const auto& [deg, c] : parity_counts) {
    if (c < 0 || (c > 0 && (deg < 2 || deg > 3))) throw DomainError("fix_parity_profile: parity degrees must be 2 or 3");
    total += c;
    extras += static_cast<long>(deg - 2) * c;
  }
  if (total != parity_bits) throw DomainError("fix_parity_profile: parity node counts do not sum to n - k");
  auto two = parity_counts.find(2);
  if (two == parity_counts.end() || two->second < 1) {
    throw DomainError("fix_parity_profile: staircase needs a degree-2 column for its last bit");
  }
  // extra edges go to distinct rows at least six rows down the staircase
  if (extras > 0 && extras > parity_bits - 6) throw DomainError("fix_parity_profile: too many extra parity edges for the staircase");

  ParityProfile out;
  out.realized_counts = parity_counts;
  out.realized_counts[2] -= 1;
  out.realized_counts[1] += 1;
  if (out.realized_counts[2] == 0) out.realized_counts.erase(2);
  for (const auto& [deg, c] : out.realized_counts) out.edges += static_cast<long>(deg) * c;

  out.check_levels[1] = 1;
  if (extras > 0) out.check_levels[3] = static_cast<int>(extras);
  if (parity_bits - 1 - extras > 0) out.check_levels[2] = static_cast<int>(parity_bits - 1 - extras);
  for (const auto& [s, c] : out.check_levels) out.rho[s] = static_cast<double>(s) * c / out.edges;
  return out;
}

double DesignProblem::mean_check_degree() const {
  const long e = std::accumulate(edges.begin(), edges.end(), 0L);
  return static_cast<double>(e) / checks;
}

int DesignProblem::min_check_degree() const {
  const long e = std::accumulate(edges.begin(), edges.end(), 0L);
  return static_cast<int>(e / checks);
}

int DesignProblem::max_check_degree() const {
  const long e = std::accumulate(edges.begin(), edges.end(), 0L);
  return static_cast<int>((e + checks - 1) / checks);
}

DesignProblem DesignProblem::from_split(const ClassSplit& split, const ClassPartition& part, int dc) {
  DesignProblem p;
  p.checks = part.check_count();
  p.dc = dc;
  p.parity_class = part.parity_class();
  p.node_counts = split.node_counts;
  const auto par = fix_parity_profile(part.check_count(), split.node_counts.at(p.parity_class));
  p.node_counts[p.parity_class] = par.realized_counts;
  p.parity_profile = par.rho;
  p.parity_levels = par.check_levels;
  for (int c = 0; c < static_cast<int>(p.node_counts.size()); ++c) {
    // The single degree-1 column at the foot of the staircase only ever
    // forwards its channel value; keeping it in the variable-side
    // distribution would cap the class MI below 1 - eps at any useful noise
    // level, so DE works with the unrealized parity degrees.
    ClassLambda cl;
    cl.class_index = c;
    cl.coeffs = lambda_from_counts(c == p.parity_class ? split.node_counts[c] : p.node_counts[c]);
    p.lambdas.push_back(std::move(cl));
    long e = 0;
    for (const auto& [deg, n] : p.node_counts[c]) e += static_cast<long>(deg) * n;
    p.edges.push_back(e);
  }
  return p;
}

DesignProblem DesignProblem::from_counts(const std::vector<std::map<int, int>>& node_counts, int checks, int dc) {
  if (checks < 1) throw DomainError("DesignProblem: need at least one check");
  DesignProblem p;
  p.checks = checks;
  p.dc = dc;
  p.node_counts = node_counts;
  for (int c = 0; c < static_cast<int>(node_counts.size()); ++c) {
    ClassLambda cl;
    cl.class_index = c;
    cl.coeffs = lambda_from_counts(node_counts[c]);
    p.lambdas.push_back(std::move(cl));
    long e = 0;
    for (const auto& [deg, n] : node_counts[c]) e += static_cast<long>(deg) * n;
    p.edges.push_back(e);
  }
  return p;
}

SocketProfile uniform_profile(long edges, int checks) {
  if (edges < 1 || checks < 1) throw DomainError("uniform_profile: need edges and checks");
  SocketProfile out;
  const long lo = edges / checks;
  if (lo == 0) {
    out[1] = 1.0;
    return out;
  }
  const long n_hi = edges - lo * checks;
  const long n_lo = checks - n_hi;
  if (n_lo > 0) out[static_cast<int>(lo)] = static_cast<double>(lo * n_lo) / edges;
  if (n_hi > 0) out[static_cast<int>(lo + 1)] = static_cast<double>((lo + 1) * n_hi) / edges;
  return out;
}

double host_checks(const SocketProfile& rho, long edges) {
  double h = 0.0;
  for (const auto& [s, r] : rho) h += edges * r / s;
  return h;
}

double OptimizerConfig::cap(int j) const {
  auto it = max_rho.find(j);
  return it == max_rho.end() ? default_max_rho : it->second;
}

std::vector<double> convergence_grid(int points) {
  if (points < 2) throw DomainError("convergence_grid: need at least two points");
  std::vector<double> x;
  for (int k = 0; k < points - 1; ++k) x.push_back(static_cast<double>(k) / (points - 1));
  x.push_back(1.0 - 1e-6);
  return x;
}

namespace {

CrossSplit make_split(const DesignProblem& p, const std::vector<bool>& fixed) {
  CrossSplit sp;
  sp.check_degree = p.mean_check_degree();
  sp.edges.assign(p.edges.begin(), p.edges.end());
  sp.fixed = fixed;
  sp.checks = p.checks;
  return sp;
}

bool occupies_all(const SocketProfile& rho, long edges, int checks) {
  return host_checks(rho, edges) >= checks - 0.5;
}

int min_support(const SocketProfile& rho) {
  for (const auto& [s, r] : rho) {
    if (r > 1e-12) return s;
  }
  return 0;
}

SocketProfile clean(const std::vector<int>& support, const std::vector<double>& x) {
  SocketProfile out;
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (x[k] > 1e-12) {
      out[support[k]] += x[k];
      total += x[k];
    }
  }
  for (auto& [s, r] : out) r /= total;
  return out;
}

double linf(const SocketProfile& a, const SocketProfile& b) {
  double d = 0.0;
  for (const auto& [s, r] : a) {
    auto it = b.find(s);
    d = std::max(d, std::abs(r - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [s, r] : b) {
    if (!a.count(s)) d = std::max(d, r);
  }
  return d;
}

/// Other classes' variable-side MI as a function of class j's, read off a DE
/// trajectory.
class Trajectory {
 public:
  Trajectory(const mi::DeTrace& trace, int j) : j_(j) {
    double run = -1.0;
    for (const auto& r : trace.records) {
      // DE should be monotone; guard against numerical wobble
      if (r.iv[j] <= run) continue;
      run = r.iv[j];
      pts_.push_back(r.iv);
    }
    if (pts_.empty()) throw DomainError("Trajectory: empty density evolution trace");
  }

  std::vector<double> at(double x) const {
    std::vector<double> out;
    if (x <= pts_.front()[j_]) {
      out = pts_.front();
    } else if (x >= pts_.back()[j_]) {
      out = pts_.back();
    } else {
      auto it = std::lower_bound(pts_.begin(), pts_.end(), x,
                                 [&](const std::vector<double>& v, double t) { return v[j_] < t; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (x - lo[j_]) / (hi[j_] - lo[j_]);
      out.resize(hi.size());
      for (std::size_t i = 0; i < hi.size(); ++i) out[i] = lo[i] + w * (hi[i] - lo[i]);
    }
    out[j_] = x;
    return out;
  }

 private:
  int j_;
  std::vector<std::vector<double>> pts_;
};

/// One linearized convergence row: sum_v coef_v y_v <= rhs.
struct DeRow {
  std::vector<double> coef;
  double rhs = 0.0;
  bool impossible = false;
};

/// Rows of the convergence constraint for class j. `terms(iv)` returns one
/// J-term per LP column (edge-weighted), `scale[v]` converts a column to the
/// fraction of class-j edges it represents.
template <class Terms>
std::vector<DeRow> convergence_rows(const DesignProblem& p, int j, const OptimizerConfig& cfg, const Trajectory& traj,
                                    Terms&& terms) {
  std::vector<DeRow> rows;
  for (double x : convergence_grid(cfg.grid_points)) {
    const double dx = std::min(cfg.margin, 0.5 * (1.0 - x));
    const double t = mi::var_update_class_inverse(cfg.sigma2_design, p.lambdas[j], x + dx);
    if (t <= 0.0) continue;
    DeRow r;
    if (t > 1.0) {
      r.impossible = true;
      rows.push_back(std::move(r));
      continue;
    }
    r.coef = terms(traj.at(x));
    r.rhs = 1.0 - t;
    rows.push_back(std::move(r));
  }
  return rows;
}

mi::DeTrace trajectory_run(const mi::DeInputs& in, const OptimizerConfig& cfg) {
  return mi::de_run(in, cfg.sigma2_design, std::max(cfg.max_iter, 200), 1e-10);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

mi::DeInputs de_inputs(const DesignProblem& p, const std::vector<SocketProfile>& profiles,
                       const std::vector<bool>& fixed, mi::CrossTermForm form) {
  mi::DeInputs in;
  in.form = form;
  in.lambdas = p.lambdas;
  const auto sp = make_split(p, fixed);
  for (int c = 0; c < p.classes(); ++c) in.views.push_back(mi::view_from_aggregate(profiles.at(c), c, sp));
  return in;
}

mi::DeInputs de_inputs(const DesignProblem& p, const TypeDistribution& joint, mi::CrossTermForm form) {
  mi::DeInputs in;
  in.form = form;
  in.lambdas = p.lambdas;
  for (int c = 0; c < p.classes(); ++c) in.views.push_back(CheckProfileView::from_types(joint, c));
  return in;
}

ClassResult optimize_class(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles,
                           const std::vector<ClassState>& states, const OptimizerConfig& cfg) {
  const int me = p.classes();
  if (j < 0 || j >= me) throw DomainError("optimize_class: class index out of range");
  if (!(cfg.sigma2_design > 0.0)) throw DomainError("optimize_class: design noise variance must be positive");
  const double cap = cfg.cap(j);
  if (!(cap > 0.0) || cap > 1.0) throw DomainError("optimize_class: max rho must lie in (0, 1]");

  ClassResult res;
  res.class_index = j;
  if (me == 1) {
    // nothing to share the checks with
    res.rho[p.max_check_degree()] = 1.0;
    res.d_min = p.max_check_degree();
    res.objective = res.d_min;
    return res;
  }

  std::vector<bool> fixed(me);
  int s_max = p.max_check_degree();
  bool pending_other = false;
  for (int i = 0; i < me; ++i) {
    fixed[i] = states[i] != ClassState::Pending;
    if (i == j) continue;
    if (fixed[i] && occupies_all(profiles[i], p.edges[i], p.checks)) s_max -= min_support(profiles[i]);
    if (!fixed[i]) {
      pending_other = true;
      s_max -= 1;  // a pending class needs at least one socket somewhere
    }
  }
  if (pending_other) s_max += 1;  // ...but not on every check
  const int floor_dmin = pending_other ? 2 : 1;
  if (s_max < floor_dmin) s_max = floor_dmin;

  const auto sp = make_split(p, fixed);
  std::vector<std::string> last_tags;
  std::string last_reason;
  for (int d_min = s_max; d_min >= floor_dmin; --d_min) {
    std::vector<int> support;
    for (int s = d_min; s <= s_max; ++s) support.push_back(s);
    SocketProfile probe;
    for (int s : support) probe[s] = 1.0;
    const auto probe_view = mi::view_from_aggregate(probe, j, sp);

    SocketProfile inc = profiles[j];
    bool feasible = false;
    int round = 0;
    lp::Solution sol;
    for (round = 1; round <= cfg.outer_rounds; ++round) {
      auto cur = profiles;
      cur[j] = inc;
      const auto in = de_inputs(p, cur, fixed, cfg.form);
      const Trajectory traj(trajectory_run(in, cfg), j);
      const auto rows = convergence_rows(p, j, cfg, traj, [&](const std::vector<double>& iv) {
        return mi::check_component_terms(probe_view, iv, cfg.form);
      });

      const int nv = static_cast<int>(support.size());
      lp::LinearProgram prog;
      for (int s : support) prog.objective.push_back(s);
      prog.add(std::vector<double>(nv, 1.0), lp::Sense::Equal, 1.0, "C1");
      for (int v = 0; v < nv; ++v) {
        std::vector<double> c(nv, 0.0);
        c[v] = 1.0;
        prog.add(c, lp::Sense::LessEqual, cap, "C2");
      }
      for (const auto& r : rows) {
        if (r.impossible) {
          prog.add(std::vector<double>(nv, 0.0), lp::Sense::LessEqual, -1.0, "C3");
        } else {
          prog.add(r.coef, lp::Sense::LessEqual, r.rhs, "C3");
        }
      }
      sol = lp::solve(prog);
      if (sol.status != lp::Status::Optimal) {
        last_tags = sol.blocking;
        break;
      }
      const auto next = clean(support, sol.x);
      const double moved = linf(next, inc);
      inc = next;
      feasible = true;
      if (moved < cfg.outer_tol) break;
    }
    if (!feasible) {
      if (cap * support.size() < 1.0 - 1e-12) {
        last_reason = "C1/C2: " + std::to_string(support.size()) + " socket counts with max rho " +
                      std::to_string(cap) + " cannot sum to 1";
      } else {
        last_reason = "C3: density evolution does not converge at the design noise";
      }
      continue;
    }
    res.rho = inc;
    res.d_min = min_support(inc);
    res.objective = 0.0;
    for (const auto& [s, r] : inc) res.objective += s * r;
    res.outer_rounds = std::min(round, cfg.outer_rounds);
    res.stabilized = round <= cfg.outer_rounds;
    res.tight = sol.blocking;
    return res;
  }
  std::ostringstream msg;
  msg << "class " << (j + 1) << ": no feasible profile for any d_min in [" << floor_dmin << ", " << s_max
      << "]; binding " << last_reason;
  const std::string binding = last_reason.substr(0, last_reason.find(':'));
  throw OptimizationFailure(j, binding.empty() ? join(last_tags) : binding, msg.str());
}

namespace {

struct JointSpace {
  std::vector<DegreeVector> types;         // ordered: d_j ascending
  std::vector<std::pair<int, int>> devs;   // (class, level) per deviation pair
};

JointSpace joint_space(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles, int d_min) {
  const int me = p.classes();
  const int d_lo = p.min_check_degree();
  const int d_hi = p.max_check_degree();
  std::vector<std::vector<int>> levels(me);
  for (int i = 0; i < me; ++i) {
    if (i == j) {
      levels[i].push_back(0);
      for (int s = std::max(1, d_min); s <= d_hi; ++s) levels[i].push_back(s);
      continue;
    }
    if (!occupies_all(profiles[i], p.edges[i], p.checks)) levels[i].push_back(0);
    for (const auto& [s, r] : profiles[i]) {
      if (r > 1e-12) levels[i].push_back(s);
    }
  }
  JointSpace js;
  DegreeVector d(me, 0);
  std::vector<std::size_t> idx(me, 0);
  while (true) {
    int sum = 0;
    for (int i = 0; i < me; ++i) {
      d[i] = levels[i][idx[i]];
      sum += d[i];
    }
    if (sum >= d_lo && sum <= d_hi) js.types.push_back(d);
    int k = 0;
    while (k < me && ++idx[k] == levels[k].size()) idx[k++] = 0;
    if (k == me) break;
  }
  std::stable_sort(js.types.begin(), js.types.end(),
                   [&](const DegreeVector& a, const DegreeVector& b) { return a[j] < b[j]; });
  for (int i = 0; i < me; ++i) {
    if (i == j || i == p.parity_class) continue;
    for (const auto& [s, r] : profiles[i]) {
      if (r > 1e-12) js.devs.push_back({i, s});
    }
  }
  return js;
}

struct JointLp {
  lp::LinearProgram prog;
  int ntypes = 0;
};

// Structural part of the final-class LP; DE rows are appended by the caller.
JointLp joint_lp(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles, const JointSpace& js,
                 double cap, double dev_budget, bool minimize_dev) {
  const int me = p.classes();
  const int nt = static_cast<int>(js.types.size());
  const int nd = static_cast<int>(js.devs.size());
  const int nv = nt + 2 * nd;
  const double m = p.checks;
  JointLp out;
  out.ntypes = nt;
  auto& prog = out.prog;
  prog.objective.assign(nv, 0.0);
  std::vector<double> dev_weight(nv, 0.0);
  for (int k = 0; k < nd; ++k) {
    const auto [i, s] = js.devs[k];
    const double w = s * m / p.edges[i];
    dev_weight[nt + 2 * k] = w;
    dev_weight[nt + 2 * k + 1] = w;
  }
  for (int t = 0; t < nt; ++t) {
    const int dj = js.types[t][j];
    prog.objective[t] = minimize_dev ? 0.0 : dj * dj * m / p.edges[j];
  }
  for (int v = nt; v < nv; ++v) prog.objective[v] = minimize_dev ? dev_weight[v] : 1e-6 * dev_weight[v];

  std::vector<double> row(nv, 0.0);
  for (int t = 0; t < nt; ++t) row[t] = 1.0;
  prog.add(row, lp::Sense::Equal, 1.0, "checks");

  for (int i = 0; i < me; ++i) {
    // every class keeps its edge count
    std::fill(row.begin(), row.end(), 0.0);
    for (int t = 0; t < nt; ++t) row[t] = js.types[t][i];
    prog.add(row, lp::Sense::Equal, p.edges[i] / m, i == j ? "C1" : "C4");
  }
  for (int i = 0; i < me; ++i) {
    if (i == j) continue;
    for (const auto& [s, r] : profiles[i]) {
      if (r <= 1e-12) continue;
      std::fill(row.begin(), row.end(), 0.0);
      for (int t = 0; t < nt; ++t) row[t] = js.types[t][i] == s ? 1.0 : 0.0;
      const double level = p.edges[i] * r / (s * m);
      if (i != p.parity_class) {
        for (int k = 0; k < static_cast<int>(js.devs.size()); ++k) {
          if (js.devs[k].first == i && js.devs[k].second == s) {
            row[nt + 2 * k] = -1.0;
            row[nt + 2 * k + 1] = 1.0;
          }
        }
      }
      prog.add(row, lp::Sense::Equal, level, "C4");
    }
  }
  for (int s = 1; s <= p.max_check_degree(); ++s) {
    std::fill(row.begin(), row.end(), 0.0);
    bool any = false;
    for (int t = 0; t < nt; ++t) {
      if (js.types[t][j] == s) {
        row[t] = s * m / p.edges[j];
        any = true;
      }
    }
    if (any && cap < 1.0) prog.add(row, lp::Sense::LessEqual, cap, "C2");
  }
  if (!minimize_dev && nd > 0) prog.add(dev_weight, lp::Sense::LessEqual, dev_budget, "C4");
  return out;
}

TypeDistribution joint_from(const JointSpace& js, const std::vector<double>& x) {
  TypeDistribution out;
  double total = 0.0;
  for (std::size_t t = 0; t < js.types.size(); ++t) {
    if (x[t] > 1e-13) {
      out[js.types[t]] = x[t];
      total += x[t];
    }
  }
  for (auto& [d, f] : out) f /= total;
  return out;
}

double deviation_of(const JointSpace& js, const DesignProblem& p, const std::vector<double>& x) {
  const int nt = static_cast<int>(js.types.size());
  double d = 0.0;
  for (std::size_t k = 0; k < js.devs.size(); ++k) {
    const auto [i, s] = js.devs[k];
    d += s * static_cast<double>(p.checks) / p.edges[i] * (x[nt + 2 * k] + x[nt + 2 * k + 1]);
  }
  return d;
}

}  // namespace

std::vector<SocketProfile> marginals(const TypeDistribution& joint, int classes) {
  std::vector<SocketProfile> out(classes);
  for (int i = 0; i < classes; ++i) {
    double total = 0.0;
    for (const auto& [d, f] : joint) total += d.at(i) * f;
    if (!(total > 0.0)) continue;
    for (const auto& [d, f] : joint) {
      if (d[i] > 0 && f > 0.0) out[i][d[i]] += d[i] * f / total;
    }
  }
  return out;
}

FinalClassResult optimize_final_class(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles,
                                      const OptimizerConfig& cfg) {
  const int me = p.classes();
  if (j < 0 || j >= me) throw DomainError("optimize_final_class: class index out of range");
  if (!(cfg.sigma2_design > 0.0)) throw DomainError("optimize_final_class: design noise variance must be positive");
  const double cap = cfg.cap(j);

  // Smallest achievable deviation of the fixed classes, ignoring convergence.
  const auto base_space = joint_space(p, j, profiles, 1);
  auto base = joint_lp(p, j, profiles, base_space, cap, 0.0, true);
  const auto base_sol = lp::solve(base.prog);
  if (base_sol.status != lp::Status::Optimal) {
    throw OptimizationFailure(j, join(base_sol.blocking),
                              "class " + std::to_string(j + 1) +
                                  ": fixed class profiles cannot share the check nodes (binding " +
                                  join(base_sol.blocking) + ")");
  }
  const double dev_star = deviation_of(base_space, p, base_sol.x);
  const double budget = dev_star + 1e-7;
  const TypeDistribution start = joint_from(base_space, base_sol.x);

  int s_max = p.max_check_degree();
  for (int i = 0; i < me; ++i) {
    if (i != j && occupies_all(profiles[i], p.edges[i], p.checks)) s_max -= min_support(profiles[i]);
  }
  s_max = std::max(s_max, 1);

  std::string last = "C3";
  for (int d_min = s_max; d_min >= 1; --d_min) {
    const auto js = joint_space(p, j, profiles, d_min);
    if (js.types.empty()) continue;
    TypeDistribution inc = start;
    bool feasible = false;
    int round = 0;
    lp::Solution sol;
    TypeDistribution next;
    for (round = 1; round <= cfg.outer_rounds; ++round) {
      const Trajectory traj(trajectory_run(de_inputs(p, inc, cfg.form), cfg), j);
      auto jl = joint_lp(p, j, profiles, js, cap, budget, false);
      const int nv = jl.prog.variables();
      CheckProfileView probe;
      probe.class_index = j;
      std::vector<int> cols;
      for (int t = 0; t < jl.ntypes; ++t) {
        if (js.types[t][j] < 1) continue;
        mi::CheckComponent c;
        c.weight = 1.0;
        c.sockets.assign(js.types[t].begin(), js.types[t].end());
        probe.components.push_back(std::move(c));
        cols.push_back(t);
      }
      const double m = p.checks;
      const auto rows = convergence_rows(p, j, cfg, traj, [&](const std::vector<double>& iv) {
        const auto terms = mi::check_component_terms(probe, iv, cfg.form);
        std::vector<double> coef(nv, 0.0);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          coef[cols[k]] = js.types[cols[k]][j] * m / p.edges[j] * terms[k];
        }
        return coef;
      });
      for (const auto& r : rows) {
        if (r.impossible) {
          jl.prog.add(std::vector<double>(nv, 0.0), lp::Sense::LessEqual, -1.0, "C3");
        } else {
          jl.prog.add(r.coef, lp::Sense::LessEqual, r.rhs, "C3");
        }
      }
      sol = lp::solve(jl.prog);
      if (sol.status != lp::Status::Optimal) {
        last = join(sol.blocking);
        break;
      }
      next = joint_from(js, sol.x);
      const auto a = marginals(next, me);
      const auto b = marginals(inc, me);
      inc = next;
      feasible = true;
      if (round > 1 && linf(a[j], b[j]) < cfg.outer_tol) break;
    }
    if (!feasible) continue;

    FinalClassResult out;
    out.joint = inc;
    out.deviation = deviation_of(js, p, sol.x);
    if (out.deviation < 1e-6) out.deviation = 0.0;
    auto& res = out.result;
    res.class_index = j;
    res.rho = marginals(inc, me)[j];
    res.d_min = min_support(res.rho);
    for (const auto& [s, r] : res.rho) res.objective += s * r;
    res.outer_rounds = std::min(round, cfg.outer_rounds);
    res.stabilized = round <= cfg.outer_rounds;
    res.tight = sol.blocking;
    return out;
  }
  throw OptimizationFailure(j, last,
                            "class " + std::to_string(j + 1) + ": no feasible check types for any d_min in [1, " +
                                std::to_string(s_max) + "]; binding " + last);
}

DesignSigma auto_design_sigma(const DesignProblem& p, double factor, double tol) {
  std::vector<SocketProfile> profiles;
  for (int c = 0; c < p.classes(); ++c) {
    profiles.push_back(c == p.parity_class ? p.parity_profile : uniform_profile(p.edges[c], p.checks));
  }
  const auto in = de_inputs(p, profiles, std::vector<bool>(p.classes(), true));
  DesignSigma out;
  out.sigma_star = mi::threshold_search(in, 0.05, 4.0, tol);
  out.sigma2 = std::pow(factor * out.sigma_star, 2);
  return out;
}

OptimizedProfile optimize_all(const DesignProblem& p, const OptimizerConfig& cfg) {
  const int me = p.classes();
  OptimizedProfile out;
  out.sigma2 = cfg.sigma2_design;
  out.rho.resize(me);
  out.d_min.assign(me, 0);
  out.objective.assign(me, 0.0);

  std::vector<SocketProfile> profiles(me);
  std::vector<ClassState> states(me, ClassState::Pending);
  for (int c = 0; c < me; ++c) {
    if (c == p.parity_class) {
      profiles[c] = p.parity_profile;
      states[c] = ClassState::Fixed;
    } else {
      profiles[c] = uniform_profile(p.edges[c], p.checks);
    }
  }
  std::vector<int> order = cfg.order;
  if (order.empty()) {
    for (int c = me - 1; c >= 0; --c) {
      if (c != p.parity_class) order.push_back(c);
    }
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int j = order[k];
    if (j < 0 || j >= me || states[j] != ClassState::Pending) {
      throw DomainError("optimize_all: bad class order entry " + std::to_string(j + 1));
    }
    int pending = 0;
    for (int c = 0; c < me; ++c) pending += states[c] == ClassState::Pending ? 1 : 0;
    if (pending == 1 && me > 1) {
      auto fin = optimize_final_class(p, j, profiles, cfg);
      profiles[j] = fin.result.rho;
      states[j] = ClassState::Optimized;
      out.rho[j] = fin.result.rho;
      out.d_min[j] = fin.result.d_min;
      out.objective[j] = fin.result.objective;
      out.joint = fin.joint;
      out.deviation = fin.deviation;
      if (!fin.result.stabilized) out.notes.push_back("class " + std::to_string(j + 1) + ": linearization not stabilized");
    } else {
      auto res = optimize_class(p, j, profiles, states, cfg);
      profiles[j] = res.rho;
      states[j] = ClassState::Optimized;
      out.rho[j] = res.rho;
      out.d_min[j] = res.d_min;
      out.objective[j] = res.objective;
      if (!res.stabilized) out.notes.push_back("class " + std::to_string(j + 1) + ": linearization not stabilized");
    }
  }
  for (int c = 0; c < me; ++c) {
    if (c == p.parity_class) {
      out.rho[c] = p.parity_profile;
      out.d_min[c] = min_support(p.parity_profile);
      for (const auto& [s, r] : p.parity_profile) out.objective[c] += s * r;
    }
  }
  if (me == 1) {
    out.joint[{p.max_check_degree()}] = 1.0;
  }
  if (out.joint.empty()) out.joint = expand_to_type_distribution(p, out.rho);
  out.realized = marginals(out.joint, me);
  if (out.deviation > 1e-9) {
    std::ostringstream os;
    os << "fixed class profiles reshaped to fit " << p.checks << " checks (L1 deviation " << out.deviation << ")";
    out.notes.push_back(os.str());
  }
  const auto cert = mi::de_run(de_inputs(p, out.joint, cfg.form), cfg.sigma2_design, cfg.max_iter, cfg.eps);
  out.certificate = cert.converged;
  out.certificate_iterations = cert.iterations_used;
  return out;
}

TypeDistribution expand_to_type_distribution(const DesignProblem& p, const std::vector<SocketProfile>& profiles,
                                             double tol) {
  const int me = p.classes();
  if (static_cast<int>(profiles.size()) != me) throw DomainError("expand_to_type_distribution: one profile per class");
  const double m = p.checks;
  std::vector<std::map<int, double>> target(me);
  for (int i = 0; i < me; ++i) {
    double hosts = 0.0;
    for (const auto& [s, r] : profiles[i]) {
      if (s < 1) throw DomainError("expand_to_type_distribution: socket counts must be >= 1");
      if (r <= 1e-12) continue;
      const double h = p.edges[i] * r / (s * m);
      target[i][s] = h;
      hosts += h;
    }
    if (hosts > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "expand_to_type_distribution: class " << (i + 1) << " needs " << hosts * m << " host checks but only "
         << p.checks << " exist";
      throw DomainError(os.str());
    }
    if (hosts < 1.0 - 1e-12) target[i][0] = 1.0 - hosts;
  }
  const int d_lo = p.min_check_degree();
  const int d_hi = p.max_check_degree();
  std::vector<DegreeVector> types;
  {
    std::vector<std::vector<int>> levels(me);
    for (int i = 0; i < me; ++i) {
      for (const auto& [s, h] : target[i]) levels[i].push_back(s);
    }
    DegreeVector d(me);
    std::vector<std::size_t> idx(me, 0);
    while (true) {
      int sum = 0;
      for (int i = 0; i < me; ++i) sum += (d[i] = levels[i][idx[i]]);
      if (sum >= d_lo && sum <= d_hi) types.push_back(d);
      int k = 0;
      while (k < me && ++idx[k] == levels[k].size()) idx[k++] = 0;
      if (k == me) break;
    }
  }
  if (types.empty()) throw DomainError("expand_to_type_distribution: no admissible check type");
  std::vector<double> w(types.size(), 1.0 / types.size());
  double gap = 1.0;
  for (int sweep = 0; sweep < 20000 && gap > tol; ++sweep) {
    for (int i = 0; i < me; ++i) {
      for (const auto& [s, h] : target[i]) {
        double cur = 0.0;
        for (std::size_t t = 0; t < types.size(); ++t) {
          if (types[t][i] == s) cur += w[t];
        }
        if (cur <= 0.0) continue;
        for (std::size_t t = 0; t < types.size(); ++t) {
          if (types[t][i] == s) w[t] *= h / cur;
        }
      }
    }
    gap = 0.0;
    for (int i = 0; i < me; ++i) {
      for (const auto& [s, h] : target[i]) {
        double cur = 0.0;
        for (std::size_t t = 0; t < types.size(); ++t) {
          if (types[t][i] == s) cur += w[t];
        }
        gap = std::max(gap, std::abs(cur - h));
      }
    }
  }
  if (gap > tol) {
    std::ostringstream os;
    os << "expand_to_type_distribution: marginals are inconsistent (largest gap " << gap * m << " checks)";
    throw DomainError(os.str());
  }
  TypeDistribution out;
  for (std::size_t t = 0; t < types.size(); ++t) {
    if (w[t] > 1e-15) out[types[t]] = w[t];
  }
  return out;
}

}  // namespace uep::opt
