#pragma once

#include <span>
#include <vector>

#include "uep/ensemble.hpp"

namespace uep::mi {

/// How incoming messages from other classes enter the check update. `Dual`
/// uses J^-1(1 - I) for every incoming edge; `AsPrinted` uses J^-1(I) for
/// edges of other classes, the form that appears in the regular-ensemble
/// check equation.
enum class CrossTermForm { Dual, AsPrinted };

/// Variable-to-check MI of a degree-dv node (sigma2 = channel noise variance).
double var_update_regular(double sigma2, int dv, double ic_prev);

/// Check-to-variable MI on a class-j edge of a check with edge-degree vector d.
double check_update_regular(const DegreeVector& d, int j, std::span<const double> iv,
                            CrossTermForm form = CrossTermForm::Dual);

double var_update_class(double sigma2, const ClassLambda& lam, double ic_prev);

/// Inverse of var_update_class in its check-side input: the smallest I_c whose
/// variable update reaches `target`. Returns 0 when the channel alone reaches
/// it and a value > 1 when no input can.
double var_update_class_inverse(double sigma2, const ClassLambda& lam, double target);

/// One term of the class-j check mixture: fraction of class-j edges `weight`
/// on checks carrying `sockets[i]` edges of class i (sockets[j] = s >= 1).
/// Socket counts of other classes may be fractional when they come from an
/// averaged composition.
struct CheckComponent {
  double weight = 0.0;
  std::vector<double> sockets;
};

struct CheckProfileView {
  int class_index = 0;
  std::vector<CheckComponent> components;

  /// Exact composition from a joint check-type distribution.
  static CheckProfileView from_types(const TypeDistribution& checks, int j);

  SocketProfile aggregate() const;
  void check(double tol = kExactTol) const;
};

/// Composition of the sockets left over on a check that carries s edges of
/// the class being analysed. Fixed classes take their per-check mean first;
/// what is left goes to the other classes in proportion to their edge counts.
struct CrossSplit {
  double check_degree = 0.0;            // mean check degree (total edges / m)
  std::vector<double> edges;            // per-class edge counts
  std::vector<bool> fixed;              // per-class: composition already known
  double checks = 0.0;                  // m

  std::vector<double> sockets(int j, int s) const;
};

CheckProfileView view_from_aggregate(const SocketProfile& profile, int j, const CrossSplit& split);

/// J-argument terms of each component for the given incoming MI; the class
/// check output is 1 - sum(weight * term). Linear in the weights.
std::vector<double> check_component_terms(const CheckProfileView& view, std::span<const double> iv,
                                          CrossTermForm form = CrossTermForm::Dual);

double check_update_class(const CheckProfileView& view, std::span<const double> iv,
                          CrossTermForm form = CrossTermForm::Dual);

struct DeInputs {
  std::vector<ClassLambda> lambdas;
  std::vector<CheckProfileView> views;
  CrossTermForm form = CrossTermForm::Dual;
};

struct DeRecord {
  std::vector<double> iv;
  std::vector<double> ic;
};

struct DeTrace {
  double sigma2 = 0.0;
  std::vector<DeRecord> records;  // records[l - 1] holds iteration l
  bool converged = false;
  int iterations_used = 0;
};

inline constexpr int kDefaultMaxIter = 200;
inline constexpr double kDefaultEps = 1e-4;

/// Multi-class Gaussian-approximation density evolution. Stops at
/// convergence (every class I_v >= 1 - eps), at max_iter, or when no class
/// moves by more than 1e-12 in an iteration.
DeTrace de_run(const DeInputs& in, double sigma2, int max_iter = kDefaultMaxIter, double eps = kDefaultEps);

/// Bisection on the noise standard deviation for the largest sigma at which
/// de_run converges. Returns sigma_hi if it already converges there.
double threshold_search(const DeInputs& in, double sigma_lo, double sigma_hi, double tol,
                        int max_iter = kDefaultMaxIter, double eps = kDefaultEps);

}  // namespace uep::mi
