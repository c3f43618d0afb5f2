#include "uep/codec.hpp"

#include <algorithm>
#include <cmath>

namespace uep::code {

bool is_lower_triangular(const SparseMatrix& h) {
  const int k = h.n - h.m;
  if (k < 0) return false;
  for (int i = 0; i < h.m; ++i) {
    const auto& rows = h.cols[k + i];
    if (rows.empty() || rows.front() != i) return false;
  }
  return true;
}

Bits encode(const SparseMatrix& h, const Bits& info) {
  const int k = h.n - h.m;
  if (static_cast<int>(info.size()) != k) throw DomainError("encode: info length must be n - m");
  if (!is_lower_triangular(h)) throw DomainError("encode: parity part is not lower triangular");
  Bits c(h.n, 0);
  std::copy(info.begin(), info.end(), c.begin());
  for (int r = 0; r < h.m; ++r) {
    std::uint8_t acc = 0;
    for (int col : h.rows[r]) {
      if (col != k + r) acc ^= c[col];
    }
    c[k + r] = acc;  // columns k+j, j > r, are absent from row r
  }
  return c;
}

Bits syndrome(const SparseMatrix& h, const Bits& word) {
  Bits s(h.m, 0);
  for (int r = 0; r < h.m; ++r) {
    for (int c : h.rows[r]) s[r] ^= word[c] & 1;
  }
  return s;
}

bool is_codeword(const SparseMatrix& h, const Bits& word) {
  for (int r = 0; r < h.m; ++r) {
    std::uint8_t acc = 0;
    for (int c : h.rows[r]) acc ^= word[c] & 1;
    if (acc) return false;
  }
  return true;
}

namespace {

double clamp_llr(double x) { return std::clamp(x, -kLlrMax, kLlrMax); }

double atanh2(double p) { return 2.0 * std::atanh(std::clamp(p, -kTanhClamp, kTanhClamp)); }

}  // namespace

double check_rule(std::span<const double> inputs) {
  double p = 1.0;
  for (double l : inputs) p *= std::tanh(0.5 * l);
  return clamp_llr(atanh2(p));
}

BpDecoder::BpDecoder(const SparseMatrix& h) : n_(h.n), m_(h.m) {
  row_start_.push_back(0);
  std::vector<std::vector<int>> per_col(n_);
  for (int r = 0; r < m_; ++r) {
    for (int c : h.rows[r]) {
      per_col[c].push_back(static_cast<int>(edge_col_.size()));
      edge_col_.push_back(c);
    }
    row_start_.push_back(static_cast<int>(edge_col_.size()));
  }
  col_start_.push_back(0);
  for (const auto& v : per_col) {
    col_edges_.insert(col_edges_.end(), v.begin(), v.end());
    col_start_.push_back(static_cast<int>(col_edges_.size()));
  }
  const std::size_t e = edge_col_.size();
  v2c_.resize(e);
  c2v_.resize(e);
  t_.resize(e);
  prefix_.resize(e);
  total_.resize(n_);
}

bool BpDecoder::hard_and_check(std::span<const double> total, Bits& bits) const {
  bool decided = true;
  for (int c = 0; c < n_; ++c) {
    bits[c] = total[c] < 0.0 ? 1 : 0;
    // an exactly-zero LLR carries no decision
    if (total[c] == 0.0) decided = false;
  }
  if (!decided) return false;
  for (int r = 0; r < m_; ++r) {
    std::uint8_t acc = 0;
    for (int e = row_start_[r]; e < row_start_[r + 1]; ++e) acc ^= bits[edge_col_[e]];
    if (acc) return false;
  }
  return true;
}

DecodeResult BpDecoder::decode(std::span<const double> llr, int max_iter) {
  if (static_cast<int>(llr.size()) != n_) throw DomainError("decode: LLR length must be n");
  DecodeResult res;
  res.bits.assign(n_, 0);
  if (hard_and_check(llr, res.bits)) {
    res.converged = true;
    return res;
  }
  for (std::size_t e = 0; e < edge_col_.size(); ++e) v2c_[e] = clamp_llr(llr[edge_col_[e]]);
  for (int it = 1; it <= max_iter; ++it) {
    // checks: extrinsic product via prefix/suffix, no division
    for (int r = 0; r < m_; ++r) {
      const int b = row_start_[r];
      const int e_end = row_start_[r + 1];
      double acc = 1.0;
      for (int e = b; e < e_end; ++e) {
        t_[e] = std::tanh(0.5 * v2c_[e]);
        prefix_[e] = acc;
        acc *= t_[e];
      }
      double suffix = 1.0;
      for (int e = e_end - 1; e >= b; --e) {
        c2v_[e] = clamp_llr(atanh2(prefix_[e] * suffix));
        suffix *= t_[e];
      }
    }
    // variables
    for (int c = 0; c < n_; ++c) {
      double t = llr[c];
      for (int k = col_start_[c]; k < col_start_[c + 1]; ++k) t += c2v_[col_edges_[k]];
      total_[c] = t;
      for (int k = col_start_[c]; k < col_start_[c + 1]; ++k) {
        const int e = col_edges_[k];
        v2c_[e] = clamp_llr(t - c2v_[e]);
      }
    }
    res.iterations = it;
    if (hard_and_check(total_, res.bits)) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

DecodeResult decode_bp(const SparseMatrix& h, std::span<const double> llr, int max_iter) {
  BpDecoder d(h);
  return d.decode(llr, max_iter);
}

}  // namespace uep::code
