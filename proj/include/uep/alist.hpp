#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uep/construction.hpp"

namespace uep::code {

/// MacKay alist: "n m", max column/row degree, the degree lists, then 1-based
/// index lists per column and per row, zero-padded to the max degree.
void write_alist(std::ostream& os, const SparseMatrix& h);
/// Accepts padded and unpadded lists. Class labels are not part of the
/// format and come back as 0.
SparseMatrix read_alist(std::istream& is);

struct CodeMeta {
  std::uint64_t seed = 0;
  int parity_class = -1;
  std::vector<int> class_of_column;
  std::vector<CheckQuota> row_quotas;
  std::vector<std::string> notes;
};

CodeMeta meta_of(const SparseMatrix& h, int parity_class, std::vector<std::string> notes = {});
void write_meta(std::ostream& os, const CodeMeta& meta);
CodeMeta read_meta(std::istream& is);

/// Writes `path` (alist) and `path + ".meta"` (JSON sidecar).
void save_code(const std::string& path, const SparseMatrix& h, const CodeMeta& meta);
/// Reads the alist and, when present, the sidecar; the sidecar's class
/// labels and seed are applied to the matrix.
SparseMatrix load_code(const std::string& path, CodeMeta* meta = nullptr);

}  // namespace uep::code
