#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "uep/ensemble.hpp"

namespace uep::code {

class ConstructionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parity-check matrix as a Tanner graph. Information columns come first
/// (class blocks, most protected first), parity columns last.
struct SparseMatrix {
  int n = 0;
  int m = 0;
  std::vector<std::vector<int>> rows;  // sorted column indices per row
  std::vector<std::vector<int>> cols;  // sorted row indices per column
  std::vector<int> class_of_column;
  std::uint64_t seed = 0;

  SparseMatrix() = default;
  SparseMatrix(int n_, int m_);

  int info_bits() const { return n - m; }
  long edges() const;
  bool has_edge(int r, int c) const;
  void add_edge(int r, int c);     // keeps both index lists sorted
  void remove_edge(int r, int c);
  int classes() const;
  /// Structural checks: sorted, mirrored, duplicate-free index lists.
  void check() const;
  bool operator==(const SparseMatrix& o) const;
};

/// Per-check socket counts, one entry per class.
using CheckQuota = std::vector<int>;

/// Where the staircase put its extra (third) parity edges.
struct StaircaseLayout {
  std::vector<int> extra_rows;  // row of each extra edge, ascending
  std::vector<int> extra_cols;  // parity column index (0-based within the parity part)
  /// Parity sockets carried by each row.
  std::vector<int> row_levels;
};

/// Lower-triangular parity part: parity column i covers rows i and i+1 (the
/// last column only row m-1); degree-3 columns get one more row at least
/// three rows below their diagonal. Counts are the unrealized parity degrees
/// (2 and 3 only).
StaircaseLayout staircase_layout(int m, const std::map<int, int>& parity_counts);

/// Matrix containing only the parity part, columns n-m..n-1.
SparseMatrix build_parity_staircase(int n, int m, const std::map<int, int>& parity_counts, int parity_class);

struct QuotaOptions {
  int parity_class = -1;               // class whose per-level check counts are exact
  std::map<int, int> parity_levels;    // sockets -> number of checks
  int min_degree = 0;                  // admissible check degree range
  int max_degree = 0;
};

/// Integer check quotas from a joint check distribution: largest-remainder
/// rounding of type counts (within each parity level when one is given),
/// then single-socket moves until every class's socket total equals its
/// edge count. Moves are reported in `notes`. Output is ordered by type,
/// largest first.
std::vector<CheckQuota> quantize_quotas(const TypeDistribution& joint, int m, const std::vector<long>& class_edges,
                                        const QuotaOptions& opt = {}, std::vector<std::string>* notes = nullptr);

/// Places quotas on rows so that each row's parity socket count matches the
/// staircase; rows within a parity level are shuffled by `seed`.
std::vector<CheckQuota> assign_rows(const std::vector<CheckQuota>& quotas, const StaircaseLayout& layout,
                                    int parity_class, std::uint64_t seed);

struct PegOptions {
  std::uint64_t seed = 1;
  int max_retries = 50;
};

/// Quota-restricted progressive edge growth. `node_counts` gives each
/// information class's column degrees; the parity part comes from
/// `parity_counts`. `row_quotas` must already be row-ordered (assign_rows).
SparseMatrix peg_construct(const std::vector<std::map<int, int>>& node_counts, int parity_class,
                           const std::map<int, int>& parity_counts, const std::vector<CheckQuota>& row_quotas,
                           const PegOptions& opt = {});

/// Length of the shortest cycle (0 when acyclic).
int girth(const SparseMatrix& h);
/// Number of 4-cycles (pairs of rows sharing two columns, counted per pair of columns).
long count_four_cycles(const SparseMatrix& h);

struct MeasuredProfile {
  std::vector<std::map<int, int>> node_counts;  // per class: column degree -> count
  std::vector<EdgeDistribution> lambdas;
  std::vector<SocketProfile> rho;               // aggregated per class
  TypeDistribution joint;                       // check fractions per d-vector
  std::vector<CheckQuota> row_quotas;
  int girth = 0;
  long four_cycles = 0;
  bool sockets_balanced = false;                // ensemble validates
};

MeasuredProfile measure_profile(const SparseMatrix& h);

}  // namespace uep::code
