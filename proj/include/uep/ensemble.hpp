#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace uep {

/// Raised when an operation is called outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Per-type socket counts of a node, one entry per edge type.
using DegreeVector = std::vector<int>;

/// Edge-perspective distribution: degree -> fraction of edges.
using EdgeDistribution = std::map<int, double>;

/// Aggregated check profile of one class: s -> rho_s (fraction of the class's
/// edges that sit on checks carrying exactly s sockets of that class).
using SocketProfile = std::map<int, double>;

/// Joint check-type distribution: d-vector -> fraction of check nodes.
using TypeDistribution = std::map<DegreeVector, double>;

inline constexpr double kExactTol = 1e-9;

struct VariableType {
  DegreeVector received;  // b, length m_r + 1 (index 0 = punctured)
  DegreeVector edges;     // d, length m_e
  double fraction = 0.0;  // L_bd, relative to the number of variable nodes
};

struct CheckType {
  DegreeVector edges;     // d, length m_e
  double fraction = 0.0;  // R_d, relative to the number of variable nodes
};

/// Node-perspective multi-edge ensemble. Only one received distribution is
/// supported, so every `received` vector is (0, 1).
struct MultiEdgeEnsemble {
  int edge_types = 0;
  int received_types = 1;
  std::vector<VariableType> var_types;
  std::vector<CheckType> check_types;
};

/// Returns (L_{x_i}(1,1), R_{x_i}(1)) for the 0-based edge type `i`.
std::pair<double, double> derivative_counts(const MultiEdgeEnsemble& ens, int i);

struct Violation {
  enum class Kind {
    Dimension,
    NegativeFraction,
    VariableSum,
    ReceivedVector,
    MixedVariable,
    SocketMismatch,
  };
  Kind kind;
  int index;  // edge type or node-type row the violation refers to
  std::string detail;

  bool operator==(const Violation& o) const { return kind == o.kind && index == o.index; }
};

std::string to_string(Violation::Kind k);

/// Empty iff every structural invariant of the ensemble holds within 1e-9.
std::vector<Violation> validate(const MultiEdgeEnsemble& ens, double tol = kExactTol);

/// rho_d^(j) = d_j R_d / R_{x_j}(1). Types with d_j == 0 are omitted.
TypeDistribution check_edge_fraction(const MultiEdgeEnsemble& ens, int j);

/// Sums rho_d^(j) over all d with d_j == s.
SocketProfile aggregate_by_socket(const TypeDistribution& rho_d, int j);

struct ClassLambda {
  int class_index = 0;
  EdgeDistribution coeffs;  // degree -> lambda_i^(j)

  double average_degree() const;  // edge-perspective mean degree
  double node_average_degree() const;
};

/// Split of the block into protection classes. Information classes come first
/// (most protected first); the parity class is always the last one.
struct ClassPartition {
  int n = 0;
  int k = 0;
  std::vector<double> info_fractions;

  int class_count() const { return static_cast<int>(info_fractions.size()) + 1; }
  int parity_class() const { return static_cast<int>(info_fractions.size()); }
  int check_count() const { return n - k; }
  double rate() const { return static_cast<double>(k) / n; }
  /// Class sizes in bits; information classes rounded by largest remainder.
  std::vector<int> class_sizes() const;
  void check() const;
};

/// Result of splitting a global variable distribution into protection classes.
struct ClassSplit {
  std::vector<ClassLambda> lambdas;
  std::vector<std::map<int, int>> node_counts;  // per class: degree -> nodes
  std::map<int, int> global_counts;             // degree -> nodes, sums to n
  int residual = 0;  // nodes moved to make the global counts sum to n

  std::vector<long> edge_counts() const;
  long total_edges() const;
};

/// Realizes lambda(x) as node counts for a block of n bits with d_c (n - k)
/// nominal edges, then fills classes greedily from the highest degree down,
/// most protected class first.
ClassSplit derive_class_lambdas(const EdgeDistribution& lambda_global, const ClassPartition& part,
                                int dc_max);

/// Builds a node-perspective ensemble from per-class node counts and a joint
/// check-type distribution over m check nodes.
MultiEdgeEnsemble make_ensemble(const std::vector<std::map<int, int>>& node_counts, int n,
                                const TypeDistribution& check_types, int m);

/// Edge-perspective lambda from node counts.
EdgeDistribution lambda_from_counts(const std::map<int, int>& counts);

/// Largest-remainder rounding of `weights * total` to integers summing to total.
std::vector<long> largest_remainder(const std::vector<double>& weights, long total);

}  // namespace uep
