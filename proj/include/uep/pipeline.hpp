#pragma once

// Glue between the stages: profile files in, matrices out. Shared by the
// command-line tool and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include "uep/construction.hpp"
#include "uep/ensemble.hpp"
#include "uep/optimizer.hpp"
#include "uep/profile_io.hpp"

namespace uep {

struct DesignSpec {
  EdgeDistribution lambda;  // global variable-node distribution
  ClassPartition part;
  int dc = 0;
};

struct Design {
  DesignSpec spec;
  ClassSplit split;
  opt::DesignProblem problem;
};

Design make_design(const DesignSpec& spec);

/// The block used in the paper's example: n = 4096, rate 1/2, 20/80 split, d_c = 9.
DesignSpec worked_example();

/// Reads [global] lambda and, when present, meta keys n, k, dc, info_fractions.
/// Missing keys keep the values already in `base`.
DesignSpec spec_from_document(const ProfileDocument& doc, DesignSpec base = {});

/// Profile file for an optimized design: class lambdas, node counts, the
/// optimizer's per-class rho, the realizable joint check types, and a
/// provenance block.
ProfileDocument profile_document(const Design& d, const opt::OptimizedProfile& r, const opt::OptimizerConfig& cfg);

struct BuiltCode {
  code::SparseMatrix h;
  int parity_class = -1;
  std::vector<std::string> notes;
};

/// Quotas from the document's check types, staircase, then PEG. `n` and
/// `rate` may differ from the document's block; the class split is then
/// redone at the new length. Throws code::ConstructionFailure.
BuiltCode build_code(const ProfileDocument& doc, int n, double rate, std::uint64_t seed);

/// "a:b:c" -> a, a+b, ..., up to c (inclusive, with a small tolerance).
std::vector<double> parse_range(const std::string& spec);

/// "0.2,0.8" -> {0.2, 0.8}
std::vector<double> parse_list(const std::string& spec);
std::string join_list(const std::vector<double>& v);

}  // namespace uep
