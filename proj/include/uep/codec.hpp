#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uep/construction.hpp"

namespace uep::code {

using Bits = std::vector<std::uint8_t>;

inline constexpr double kLlrMax = 30.0;
inline constexpr double kTanhClamp = 1.0 - 1e-15;

/// True when the parity part (last m columns) is lower triangular with a
/// full diagonal: parity column i has its first row at i.
bool is_lower_triangular(const SparseMatrix& h);

/// Systematic encoding by back-substitution: codeword = (info, parity).
Bits encode(const SparseMatrix& h, const Bits& info);

Bits syndrome(const SparseMatrix& h, const Bits& word);
bool is_codeword(const SparseMatrix& h, const Bits& word);

/// Exact check rule: 2 atanh(prod tanh(l/2)), clamped.
double check_rule(std::span<const double> inputs);

struct DecodeResult {
  Bits bits;
  int iterations = 0;
  bool converged = false;
};

/// Flooding sum-product decoder. Positive LLR means bit 0. Buffers are
/// reused across calls, so one decoder per thread.
class BpDecoder {
 public:
  explicit BpDecoder(const SparseMatrix& h);
  DecodeResult decode(std::span<const double> llr, int max_iter);

 private:
  bool hard_and_check(std::span<const double> total, Bits& bits) const;

  int n_;
  int m_;
  std::vector<int> row_start_;    // CSR over edges, row-major
  std::vector<int> edge_col_;
  std::vector<int> col_start_;    // per column: indices into col_edges_
  std::vector<int> col_edges_;
  std::vector<double> v2c_;
  std::vector<double> c2v_;
  std::vector<double> t_;
  std::vector<double> prefix_;
  std::vector<double> total_;
};

DecodeResult decode_bp(const SparseMatrix& h, std::span<const double> llr, int max_iter);

}  // namespace uep::code
