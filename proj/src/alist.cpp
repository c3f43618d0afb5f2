#include "uep/alist.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uep::code {

void write_alist(std::ostream& os, const SparseMatrix& h) {
  std::size_t max_col = 0;
  std::size_t max_row = 0;
  for (const auto& c : h.cols) max_col = std::max(max_col, c.size());
  for (const auto& r : h.rows) max_row = std::max(max_row, r.size());
  os << h.n << ' ' << h.m << '\n' << max_col << ' ' << max_row << '\n';
  for (int c = 0; c < h.n; ++c) os << h.cols[c].size() << (c + 1 < h.n ? " " : "\n");
  for (int r = 0; r < h.m; ++r) os << h.rows[r].size() << (r + 1 < h.m ? " " : "\n");
  auto list = [&](const std::vector<int>& v, std::size_t width) {
    for (std::size_t k = 0; k < width; ++k) {
      if (k) os << ' ';
      os << (k < v.size() ? v[k] + 1 : 0);
    }
    os << '\n';
  };
  for (const auto& c : h.cols) list(c, max_col);
  for (const auto& r : h.rows) list(r, max_row);
}

namespace {

std::vector<long> ints_of_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream ls(line);
  std::vector<long> out;
  long v;
  while (ls >> v) out.push_back(v);
  if (!ls.eof()) throw std::runtime_error("alist: non-numeric token");
  return out;
}

}  // namespace

SparseMatrix read_alist(std::istream& is) {
  const auto head = ints_of_line(is);
  if (head.size() != 2 || head[0] < 1 || head[1] < 1) throw std::runtime_error("alist: bad size line");
  const int n = static_cast<int>(head[0]);
  const int m = static_cast<int>(head[1]);
  ints_of_line(is);  // max degrees
  const auto cdeg = ints_of_line(is);
  const auto rdeg = ints_of_line(is);
  if (static_cast<int>(cdeg.size()) != n || static_cast<int>(rdeg.size()) != m) {
    throw std::runtime_error("alist: degree list length mismatch");
  }
  SparseMatrix h(n, m);
  for (int c = 0; c < n; ++c) {
    const auto idx = ints_of_line(is);
    long nz = 0;
    for (long r : idx) {
      if (r == 0) continue;
      if (r < 1 || r > m) throw std::runtime_error("alist: row index out of range");
      h.add_edge(static_cast<int>(r - 1), c);
      ++nz;
    }
    if (nz != cdeg[c]) throw std::runtime_error("alist: column " + std::to_string(c + 1) + " degree mismatch");
  }
  for (int r = 0; r < m; ++r) {
    const auto idx = ints_of_line(is);
    std::vector<int> cols;
    for (long c : idx) {
      if (c != 0) cols.push_back(static_cast<int>(c - 1));
    }
    std::sort(cols.begin(), cols.end());
    if (cols != h.rows[r] || static_cast<long>(cols.size()) != rdeg[r]) {
      throw std::runtime_error("alist: row " + std::to_string(r + 1) + " disagrees with the column lists");
    }
  }
  h.check();
  return h;
}

CodeMeta meta_of(const SparseMatrix& h, int parity_class, std::vector<std::string> notes) {
  CodeMeta m;
  m.seed = h.seed;
  m.parity_class = parity_class;
  m.class_of_column = h.class_of_column;
  const int me = std::max(1, h.classes());
  m.row_quotas.assign(h.m, CheckQuota(me, 0));
  for (int r = 0; r < h.m; ++r) {
    for (int c : h.rows[r]) ++m.row_quotas[r][h.class_of_column[c]];
  }
  m.notes = std::move(notes);
  return m;
}

void write_meta(std::ostream& os, const CodeMeta& meta) {
  nlohmann::json j;
  j["format"] = "uep-code-meta/1";
  j["seed"] = meta.seed;
  j["parity_class"] = meta.parity_class;
  // class labels as runs [first column, count, class]
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t c = 0; c < meta.class_of_column.size();) {
    std::size_t e = c;
    while (e < meta.class_of_column.size() && meta.class_of_column[e] == meta.class_of_column[c]) ++e;
    runs.push_back({c, e - c, meta.class_of_column[c]});
    c = e;
  }
  j["class_runs"] = runs;
  j["row_quotas"] = meta.row_quotas;
  j["notes"] = meta.notes;
  os << j.dump(1) << '\n';
}

CodeMeta read_meta(std::istream& is) {
  const auto j = nlohmann::json::parse(is);
  if (j.value("format", "") != "uep-code-meta/1") throw std::runtime_error("meta: unknown format");
  CodeMeta m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.parity_class = j.at("parity_class").get<int>();
  for (const auto& run : j.at("class_runs")) {
    const auto count = run.at(1).get<std::size_t>();
    m.class_of_column.insert(m.class_of_column.end(), count, run.at(2).get<int>());
  }
  m.row_quotas = j.at("row_quotas").get<std::vector<CheckQuota>>();
  m.notes = j.value("notes", std::vector<std::string>{});
  return m;
}

void save_code(const std::string& path, const SparseMatrix& h, const CodeMeta& meta) {
  std::ofstream a(path);
  if (!a) throw std::runtime_error("cannot write " + path);
  write_alist(a, h);
  std::ofstream m(path + ".meta");
  if (!m) throw std::runtime_error("cannot write " + path + ".meta");
  write_meta(m, meta);
}

SparseMatrix load_code(const std::string& path, CodeMeta* meta) {
  std::ifstream a(path);
  if (!a) throw std::runtime_error("cannot read " + path);
  SparseMatrix h = read_alist(a);
  const std::string mp = path + ".meta";
  if (std::filesystem::exists(mp)) {
    std::ifstream m(mp);
    CodeMeta cm = read_meta(m);
    if (static_cast<int>(cm.class_of_column.size()) != h.n) throw std::runtime_error("meta: column count mismatch");
    h.class_of_column = cm.class_of_column;
    h.seed = cm.seed;
    if (meta) *meta = std::move(cm);
  } else if (meta) {
    *meta = meta_of(h, -1);
  }
  return h;
}

}  // namespace uep::code
