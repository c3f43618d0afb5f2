#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uep/density_evolution.hpp"
#include "uep/ensemble.hpp"

namespace uep::opt {

/// Check-side structure forced by a lower-triangular (staircase) parity part.
struct ParityProfile {
  SocketProfile rho;                   // aggregated class profile on the check side
  std::map<int, int> realized_counts;  // parity column degrees after the staircase
  std::map<int, int> check_levels;     // sockets per check -> number of checks
  long edges = 0;
};

/// Staircase realization of the parity class: column i joins rows i and i+1,
/// the last column only its own row, and each degree-3 column adds one edge
/// to a distinct row further down. Parity degrees must be 2 or 3.
ParityProfile fix_parity_profile(int parity_bits, const std::map<int, int>& parity_counts);

/// Everything the optimizer needs to know about the code being designed.
struct DesignProblem {
  int checks = 0;    // m
  int dc = 0;        // nominal check degree
  std::vector<ClassLambda> lambdas;
  std::vector<std::map<int, int>> node_counts;
  std::vector<long> edges;
  int parity_class = -1;          // -1: no staircase parity part
  SocketProfile parity_profile;   // valid when parity_class >= 0
  std::map<int, int> parity_levels;

  int classes() const { return static_cast<int>(edges.size()); }
  double mean_check_degree() const;
  int min_check_degree() const;
  int max_check_degree() const;

  /// Uses the staircase-realized degrees for the parity class.
  static DesignProblem from_split(const ClassSplit& split, const ClassPartition& part, int dc);
  /// A problem without a parity part; every class is optimizable.
  static DesignProblem from_counts(const std::vector<std::map<int, int>>& node_counts, int checks, int dc);
};

/// Each check carries floor or ceil of the class's mean socket count.
SocketProfile uniform_profile(long edges, int checks);

/// Number of checks carrying at least one edge of a class with this profile.
double host_checks(const SocketProfile& rho, long edges);

struct OptimizerConfig {
  double sigma2_design = 0.0;
  std::map<int, double> max_rho;  // per class; classes not listed use default_max_rho
  double default_max_rho = 1.0;
  std::vector<int> order;         // empty: least protected information class first
  int grid_points = 101;
  double margin = 1e-5;
  int max_iter = mi::kDefaultMaxIter;
  double eps = mi::kDefaultEps;
  int outer_rounds = 20;
  double outer_tol = 1e-6;
  mi::CrossTermForm form = mi::CrossTermForm::Dual;

  double cap(int j) const;
};

enum class ClassState { Pending, Optimized, Fixed };

struct ClassResult {
  int class_index = 0;
  SocketProfile rho;
  int d_min = 0;
  double objective = 0.0;  // average check degree of the class (sum s rho_s)
  int outer_rounds = 0;
  bool stabilized = true;
  std::vector<std::string> tight;  // constraint families tight at the optimum
};

class OptimizationFailure : public std::runtime_error {
 public:
  OptimizationFailure(int class_index, std::string binding, const std::string& what)
      : std::runtime_error(what), class_index_(class_index), binding_(std::move(binding)) {}
  int class_index() const { return class_index_; }
  const std::string& binding() const { return binding_; }

 private:
  int class_index_;
  std::string binding_;
};

/// The LP grid of the convergence constraint: x in {0, 0.01, ..., 1 - 1e-6}.
std::vector<double> convergence_grid(int points);

/// Builds DE inputs from aggregated profiles (averaged cross-terms), with
/// `fixed` flagging classes whose composition is already known.
mi::DeInputs de_inputs(const DesignProblem& p, const std::vector<SocketProfile>& profiles,
                       const std::vector<bool>& fixed, mi::CrossTermForm form = mi::CrossTermForm::Dual);

/// DE inputs with exact per-type cross-terms from a joint check distribution.
mi::DeInputs de_inputs(const DesignProblem& p, const TypeDistribution& joint,
                       mi::CrossTermForm form = mi::CrossTermForm::Dual);

/// Aggregated-profile LP for class j (least-protected-first step). Other
/// classes contribute through `profiles` and `states`; profiles[j] is the
/// starting incumbent of the linearization.
ClassResult optimize_class(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles,
                           const std::vector<ClassState>& states, const OptimizerConfig& cfg);

/// Result of the last optimization step, which works on full check types.
struct FinalClassResult {
  ClassResult result;
  TypeDistribution joint;      // check fractions per d-vector
  double deviation = 0.0;      // L1 distance (rho units) forced onto fixed classes
};

/// LP over joint check types for the last class to be optimized: profiles of
/// all other classes are held fixed (parity exactly, information classes as
/// closely as the check count allows).
FinalClassResult optimize_final_class(const DesignProblem& p, int j, const std::vector<SocketProfile>& profiles,
                                      const OptimizerConfig& cfg);

struct OptimizedProfile {
  std::vector<SocketProfile> rho;  // optimizer output per class
  std::vector<int> d_min;
  std::vector<double> objective;
  TypeDistribution joint;              // realizable check-type distribution
  std::vector<SocketProfile> realized; // per-class marginals of `joint`
  double deviation = 0.0;
  double sigma2 = 0.0;
  bool certificate = false;        // joint DE converges at sigma2
  int certificate_iterations = 0;
  std::vector<std::string> notes;
};

OptimizedProfile optimize_all(const DesignProblem& p, const OptimizerConfig& cfg);

struct DesignSigma {
  double sigma_star = 0.0;  // DE threshold (noise std) of the uniform-connection ensemble
  double sigma2 = 0.0;      // (factor * sigma_star)^2
};

/// Default design point relative to the uniform-connection threshold.
inline constexpr double kDesignFactor = 0.96;

DesignSigma auto_design_sigma(const DesignProblem& p, double factor = kDesignFactor, double tol = 1e-5);

/// Joint check-type distribution with the given per-class marginals, by
/// iterative proportional fitting from the uniform distribution over all
/// admissible types. Throws DomainError with the largest marginal gap when
/// no such distribution exists.
TypeDistribution expand_to_type_distribution(const DesignProblem& p, const std::vector<SocketProfile>& profiles,
                                             double tol = 1e-8);

/// Per-class aggregated profiles of a joint distribution.
std::vector<SocketProfile> marginals(const TypeDistribution& joint, int classes);

}  // namespace uep::opt
