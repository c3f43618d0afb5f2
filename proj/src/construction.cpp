#include "uep/construction.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace uep::code {

SparseMatrix::SparseMatrix(int n_, int m_) : n(n_), m(m_), rows(m_), cols(n_), class_of_column(n_, 0) {}

long SparseMatrix::edges() const {
  long e = 0;
  for (const auto& r : rows) e += static_cast<long>(r.size());
  return e;
}

bool SparseMatrix::has_edge(int r, int c) const {
  const auto& v = rows[r];
  return std::binary_search(v.begin(), v.end(), c);
}

void SparseMatrix::add_edge(int r, int c) {
  auto& rv = rows.at(r);
  auto& cv = cols.at(c);
  auto it = std::lower_bound(rv.begin(), rv.end(), c);
  if (it != rv.end() && *it == c) throw ConstructionFailure("duplicate edge");
  rv.insert(it, c);
  cv.insert(std::lower_bound(cv.begin(), cv.end(), r), r);
}

void SparseMatrix::remove_edge(int r, int c) {
  auto& rv = rows.at(r);
  auto& cv = cols.at(c);
  auto it = std::lower_bound(rv.begin(), rv.end(), c);
  if (it == rv.end() || *it != c) throw ConstructionFailure("remove_edge: no such edge");
  rv.erase(it);
  cv.erase(std::lower_bound(cv.begin(), cv.end(), r));
}

int SparseMatrix::classes() const {
  int c = 0;
  for (int k : class_of_column) c = std::max(c, k + 1);
  return c;
}

void SparseMatrix::check() const {
  if (static_cast<int>(rows.size()) != m || static_cast<int>(cols.size()) != n ||
      static_cast<int>(class_of_column.size()) != n) {
    throw ConstructionFailure("matrix dimensions inconsistent");
  }
  long mirrored = 0;
  for (int r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < rows[r].size(); ++k) {
      const int c = rows[r][k];
      if (c < 0 || c >= n) throw ConstructionFailure("column index out of range");
      if (k > 0 && rows[r][k - 1] >= c) throw ConstructionFailure("row list not strictly increasing");
      if (!std::binary_search(cols[c].begin(), cols[c].end(), r)) throw ConstructionFailure("edge not mirrored");
      ++mirrored;
    }
  }
  long total = 0;
  for (const auto& cv : cols) {
    for (std::size_t k = 1; k < cv.size(); ++k) {
      if (cv[k - 1] >= cv[k]) throw ConstructionFailure("column list not strictly increasing");
    }
    total += static_cast<long>(cv.size());
  }
  if (total != mirrored) throw ConstructionFailure("row and column lists disagree");
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
  return n == o.n && m == o.m && rows == o.rows && class_of_column == o.class_of_column;
}

StaircaseLayout staircase_layout(int m, const std::map<int, int>& parity_counts) {
  if (m < 1) throw DomainError("staircase_layout: need at least one parity bit");
  long total = 0;
  long extras = 0;
  for (const auto& [deg, c] : parity_counts) {
    if (c < 0 || (c > 0 && (deg < 2 || deg > 3))) {
      throw DomainError("staircase_layout: parity columns must have degree 2 or 3");
    }
    total += c;
    if (deg == 3) extras += c;
  }
  if (total != m) throw DomainError("staircase_layout: parity node counts do not sum to the row count");
  if (extras > 0 && extras > m - 6) throw DomainError("staircase_layout: too many degree-3 parity columns");

  StaircaseLayout out;
  out.row_levels.assign(m, 2);
  out.row_levels[0] = 1;
  if (m == 1) return out;
  const int x = static_cast<int>(extras);
  const bool spread = x > 0 && 2 * x <= m - 6;
  for (int k = 0; k < x; ++k) {
    const int r = 6 + static_cast<int>(static_cast<long>(k) * (m - 6) / x);
    out.extra_rows.push_back(r);
    out.extra_cols.push_back(spread ? r / 2 : r - 3);
    out.row_levels[r] = 3;
  }
  return out;
}

SparseMatrix build_parity_staircase(int n, int m, const std::map<int, int>& parity_counts, int parity_class) {
  if (n < m) throw DomainError("build_parity_staircase: fewer columns than rows");
  const auto layout = staircase_layout(m, parity_counts);
  SparseMatrix h(n, m);
  const int k = n - m;
  for (int i = 0; i < m; ++i) {
    h.class_of_column[k + i] = parity_class;
    h.add_edge(i, k + i);
    if (i + 1 < m) h.add_edge(i + 1, k + i);
  }
  for (std::size_t e = 0; e < layout.extra_rows.size(); ++e) h.add_edge(layout.extra_rows[e], k + layout.extra_cols[e]);
  return h;
}

namespace {

int degree_of(const DegreeVector& d) { return std::accumulate(d.begin(), d.end(), 0); }

}  // namespace

std::vector<CheckQuota> quantize_quotas(const TypeDistribution& joint, int m, const std::vector<long>& class_edges,
                                        const QuotaOptions& opt, std::vector<std::string>* notes) {
  if (m < 1 || joint.empty()) throw DomainError("quantize_quotas: empty input");
  const int me = static_cast<int>(class_edges.size());
  const long total_edges = std::accumulate(class_edges.begin(), class_edges.end(), 0L);
  const int dmin = opt.min_degree > 0 ? opt.min_degree : static_cast<int>(total_edges / m);
  const int dmax = opt.max_degree > 0 ? opt.max_degree : static_cast<int>((total_edges + m - 1) / m);
  const int pc = opt.parity_class;

  std::map<int, std::vector<std::pair<DegreeVector, double>>> groups;
  for (const auto& [d, f] : joint) {
    if (static_cast<int>(d.size()) != me) throw DomainError("quantize_quotas: type length does not match classes");
    if (f > 0.0) groups[pc >= 0 ? d[pc] : 0].push_back({d, f});
  }
  std::map<DegreeVector, long> counts;
  for (const auto& [key, items] : groups) {
    long target = m;
    if (pc >= 0) {
      auto it = opt.parity_levels.find(key);
      if (it == opt.parity_levels.end()) {
        throw DomainError("quantize_quotas: parity level " + std::to_string(key) + " has no rows");
      }
      target = it->second;
    }
    std::vector<double> w;
    for (const auto& it : items) w.push_back(it.second);
    const auto c = largest_remainder(w, target);
    for (std::size_t k = 0; k < items.size(); ++k) counts[items[k].first] += c[k];
  }
  if (pc >= 0) {
    long rows = 0;
    for (const auto& [s, c] : opt.parity_levels) {
      rows += c;
      if (!groups.count(s) && c > 0) {
        throw DomainError("quantize_quotas: no check type carries " + std::to_string(s) + " parity sockets");
      }
    }
    if (rows != m) throw DomainError("quantize_quotas: parity levels do not cover all rows");
  }

  std::vector<long> diff(me);
  for (int i = 0; i < me; ++i) {
    long have = 0;
    for (const auto& [d, c] : counts) have += c * d[i];
    diff[i] = class_edges[i] - have;
  }
  if (pc >= 0 && diff[pc] != 0) throw DomainError("quantize_quotas: parity sockets do not match the staircase");

  int moves = 0;
  for (int guard = 0; guard < 10 * m + 1000; ++guard) {
    int up = -1;
    int down = -1;
    for (int i = 0; i < me; ++i) {
      if (i == pc) continue;
      if (diff[i] > 0 && up < 0) up = i;
      if (diff[i] < 0 && down < 0) down = i;
    }
    if (up < 0 && down < 0) break;
    const DegreeVector* best = nullptr;
    DegreeVector best_to;
    long best_score = -1;
    for (const auto& [d, c] : counts) {
      if (c <= 0) continue;
      DegreeVector to = d;
      if (down >= 0) {
        if (d[down] < 1) continue;
        --to[down];
      }
      if (up >= 0) ++to[up];
      const int deg = degree_of(to);
      if (deg < dmin || deg > dmax) continue;
      const long score = (joint.count(to) ? 1000000000L : 0L) + c;
      if (score > best_score) {
        best_score = score;
        best = &d;
        best_to = to;
      }
    }
    if (!best) throw DomainError("quantize_quotas: cannot balance class socket counts");
    const DegreeVector from = *best;
    --counts[from];
    ++counts[best_to];
    if (up >= 0) --diff[up];
    if (down >= 0) ++diff[down];
    ++moves;
  }
  for (int i = 0; i < me; ++i) {
    if (diff[i] != 0) throw DomainError("quantize_quotas: socket balance not reached");
  }
  if (notes && moves > 0) {
    notes->push_back("quota rounding: " + std::to_string(moves) + " single-socket moves to balance class edges");
  }
  std::vector<CheckQuota> out;
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    for (long c = 0; c < it->second; ++c) out.push_back(it->first);
  }
  return out;
}

std::vector<CheckQuota> assign_rows(const std::vector<CheckQuota>& quotas, const StaircaseLayout& layout,
                                    int parity_class, std::uint64_t seed) {
  const int m = static_cast<int>(quotas.size());
  std::mt19937_64 rng(seed);
  std::vector<CheckQuota> out(m);
  if (parity_class < 0) {
    out = quotas;
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  }
  if (static_cast<int>(layout.row_levels.size()) != m) throw DomainError("assign_rows: layout row count mismatch");
  std::map<int, std::vector<CheckQuota>> by_level;
  for (const auto& q : quotas) by_level[q.at(parity_class)].push_back(q);
  std::map<int, std::vector<int>> rows_by_level;
  for (int r = 0; r < m; ++r) rows_by_level[layout.row_levels[r]].push_back(r);
  for (auto& [lvl, qs] : by_level) {
    auto& rows = rows_by_level[lvl];
    if (rows.size() != qs.size()) {
      throw DomainError("assign_rows: " + std::to_string(qs.size()) + " quotas with " + std::to_string(lvl) +
                        " parity sockets but the staircase has " + std::to_string(rows.size()) + " such rows");
    }
    std::shuffle(qs.begin(), qs.end(), rng);
    for (std::size_t k = 0; k < rows.size(); ++k) out[rows[k]] = qs[k];
  }
  return out;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Peg {
 public:
  Peg(SparseMatrix& h, std::vector<std::vector<int>>& rem)
      : h_(h), rem_(rem), row_stamp_(h.m, 0), col_stamp_(h.n, 0) {}

  bool place(int v, int cls, int degree, std::mt19937_64& rng) {
    for (int e = 0; e < degree; ++e) {
      int cand_total = 0;
      for (int r = 0; r < h_.m; ++r) {
        if (rem_[r][cls] > 0 && !h_.has_edge(r, v)) ++cand_total;
      }
      if (cand_total == 0) return false;
      pool_.clear();
      if (h_.cols[v].empty()) {
        for (int r = 0; r < h_.m; ++r) {
          if (rem_[r][cls] > 0) pool_.push_back(r);
        }
      } else {
        expand(v, cls, cand_total);
      }
      int best = -1;
      for (int r : pool_) best = std::max(best, rem_[r][cls]);
      tie_.clear();
      for (int r : pool_) {
        if (rem_[r][cls] == best) tie_.push_back(r);
      }
      const int r = tie_[std::uniform_int_distribution<std::size_t>(0, tie_.size() - 1)(rng)];
      h_.add_edge(r, v);
      --rem_[r][cls];
    }
    return true;
  }

 private:
  bool candidate(int r, int cls) const { return rem_[r][cls] > 0; }

  // Breadth-first growth of the tree rooted at v; leaves pool_ holding the
  // farthest (or unreachable) candidate rows.
  void expand(int v, int cls, int cand_total) {
    ++stamp_;
    col_stamp_[v] = stamp_;
    frontier_.clear();
    for (int r : h_.cols[v]) {
      row_stamp_[r] = stamp_;
      frontier_.push_back(r);
    }
    int reached = 0;
    while (true) {
      next_.clear();
      for (int r : frontier_) {
        for (int c : h_.rows[r]) {
          if (col_stamp_[c] == stamp_) continue;
          col_stamp_[c] = stamp_;
          for (int r2 : h_.cols[c]) {
            if (row_stamp_[r2] == stamp_) continue;
            row_stamp_[r2] = stamp_;
            next_.push_back(r2);
            if (candidate(r2, cls)) ++reached;
          }
        }
      }
      if (next_.empty()) {
        for (int r = 0; r < h_.m; ++r) {
          if (candidate(r, cls) && row_stamp_[r] != stamp_) pool_.push_back(r);
        }
        return;
      }
      if (reached == cand_total) {
        for (int r : next_) {
          if (candidate(r, cls)) pool_.push_back(r);
        }
        return;
      }
      frontier_.swap(next_);
    }
  }

  SparseMatrix& h_;
  std::vector<std::vector<int>>& rem_;
  std::vector<int> row_stamp_;
  std::vector<int> col_stamp_;
  int stamp_ = 0;
  std::vector<int> frontier_;
  std::vector<int> next_;
  std::vector<int> pool_;
  std::vector<int> tie_;
};

bool edge_in_four_cycle(const SparseMatrix& h, int r, int c, std::vector<int>& mark, int& stamp) {
  ++stamp;
  for (int y : h.cols[c]) mark[y] = stamp;
  for (int x : h.rows[r]) {
    if (x == c) continue;
    for (int y : h.cols[x]) {
      if (y != r && mark[y] == stamp) return true;
    }
  }
  return false;
}

// PEG can still close a 4-cycle when the last columns of a class find quota
// left only in nearby rows. Swapping the endpoints of two same-class edges
// keeps every row quota and column degree; accept swaps that leave all four
// touched edges outside 4-cycles.
void break_four_cycles(SparseMatrix& h, int parity_class, std::mt19937_64& rng) {
  std::vector<int> mark(h.m, 0);
  int stamp = 0;
  std::map<int, std::vector<int>> by_class;
  for (int c = 0; c < h.n; ++c) {
    if (h.class_of_column[c] != parity_class) by_class[h.class_of_column[c]].push_back(c);
  }
  // small dense blocks can have unavoidable 4-cycles: give up after three
  // passes without progress
  std::size_t best = SIZE_MAX;
  int stale = 0;
  for (int pass = 0; pass < 100 && stale < 3; ++pass) {
    std::vector<std::pair<int, int>> bad;
    for (const auto& [cls, columns] : by_class) {
      for (int c : columns) {
        for (int r : h.cols[c]) {
          if (edge_in_four_cycle(h, r, c, mark, stamp)) bad.push_back({r, c});
        }
      }
    }
    if (bad.empty()) return;
    if (bad.size() < best) {
      best = bad.size();
      stale = 0;
    } else {
      ++stale;
    }
    for (const auto& [r, c] : bad) {
      if (!h.has_edge(r, c) || !edge_in_four_cycle(h, r, c, mark, stamp)) continue;
      const auto& pool = by_class[h.class_of_column[c]];
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (int attempt = 0; attempt < 200; ++attempt) {
        const int c2 = pool[pick(rng)];
        if (c2 == c || h.cols[c2].empty()) continue;
        const int r2 = h.cols[c2][std::uniform_int_distribution<std::size_t>(0, h.cols[c2].size() - 1)(rng)];
        if (r2 == r || h.has_edge(r2, c) || h.has_edge(r, c2)) continue;
        h.remove_edge(r, c);
        h.remove_edge(r2, c2);
        h.add_edge(r2, c);
        h.add_edge(r, c2);
        if (!edge_in_four_cycle(h, r2, c, mark, stamp) && !edge_in_four_cycle(h, r, c2, mark, stamp)) break;
        h.remove_edge(r2, c);
        h.remove_edge(r, c2);
        h.add_edge(r, c);
        h.add_edge(r2, c2);
      }
    }
  }
}

}  // namespace

SparseMatrix peg_construct(const std::vector<std::map<int, int>>& node_counts, int parity_class,
                           const std::map<int, int>& parity_counts, const std::vector<CheckQuota>& row_quotas,
                           const PegOptions& opt) {
  const int me = static_cast<int>(node_counts.size());
  const int m = static_cast<int>(row_quotas.size());
  int k = 0;
  for (int c = 0; c < me; ++c) {
    if (c == parity_class) continue;
    for (const auto& [deg, cnt] : node_counts[c]) k += cnt;
  }
  int parity_bits = 0;
  if (parity_class >= 0) {
    for (const auto& [deg, cnt] : parity_counts) parity_bits += cnt;
    if (parity_bits != m) throw ConstructionFailure("peg_construct: parity bits must equal the row count");
  }
  const int n = k + parity_bits;

  SparseMatrix h = parity_class >= 0 ? build_parity_staircase(n, m, parity_counts, parity_class) : SparseMatrix(n, m);
  h.seed = opt.seed;

  std::vector<std::vector<int>> rem(m, std::vector<int>(me, 0));
  for (int r = 0; r < m; ++r) {
    if (static_cast<int>(row_quotas[r].size()) != me) throw ConstructionFailure("peg_construct: quota length mismatch");
    rem[r] = row_quotas[r];
    if (parity_class >= 0) {
      if (static_cast<int>(h.rows[r].size()) != row_quotas[r][parity_class]) {
        throw ConstructionFailure("peg_construct: row " + std::to_string(r) +
                                  " parity quota differs from the staircase");
      }
      rem[r][parity_class] = 0;
    }
  }
  // column order: classes most protected first, degrees descending
  std::vector<std::pair<int, int>> order;  // (class, degree)
  for (int c = 0; c < me; ++c) {
    if (c == parity_class) continue;
    long sockets = 0;
    long quota = 0;
    for (auto it = node_counts[c].rbegin(); it != node_counts[c].rend(); ++it) {
      for (int q = 0; q < it->second; ++q) order.push_back({c, it->first});
      sockets += static_cast<long>(it->first) * it->second;
    }
    for (int r = 0; r < m; ++r) quota += row_quotas[r][c];
    if (sockets != quota) {
      throw ConstructionFailure("peg_construct: class " + std::to_string(c + 1) + " has " + std::to_string(sockets) +
                                " column sockets but " + std::to_string(quota) + " row sockets");
    }
  }

  Peg peg(h, rem);
  for (int v = 0; v < static_cast<int>(order.size()); ++v) {
    const auto [cls, deg] = order[v];
    h.class_of_column[v] = cls;
    bool ok = false;
    for (int attempt = 0; attempt <= opt.max_retries && !ok; ++attempt) {
      std::mt19937_64 rng(mix(opt.seed ^ mix(static_cast<std::uint64_t>(v) * 1315423911ULL + attempt)));
      ok = peg.place(v, cls, deg, rng);
      if (!ok) {
        const auto placed = h.cols[v];
        for (int r : placed) {
          h.remove_edge(r, v);
          ++rem[r][cls];
        }
      }
    }
    if (!ok) {
      throw ConstructionFailure("peg_construct: column " + std::to_string(v) + " (class " + std::to_string(cls + 1) +
                                ", degree " + std::to_string(deg) + ") cannot be placed after " +
                                std::to_string(opt.max_retries) + " retries");
    }
  }
  std::mt19937_64 rng(mix(opt.seed ^ 0x4c3bULL));
  break_four_cycles(h, parity_class, rng);
  h.check();
  return h;
}

int girth(const SparseMatrix& h) {
  const int total = h.n + h.m;
  std::vector<int> dist(total, -1);
  std::vector<int> parent(total, -1);
  std::vector<int> touched;
  std::vector<int> queue;
  int best = 0;
  for (int s = 0; s < h.n; ++s) {
    for (int t : touched) dist[t] = -1;
    touched.clear();
    queue.clear();
    dist[s] = 0;
    parent[s] = -1;
    touched.push_back(s);
    queue.push_back(s);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      if (best > 0 && 2 * dist[u] + 2 > best) break;
      const auto& nb = u < h.n ? h.cols[u] : h.rows[u - h.n];
      for (int x : nb) {
        const int w = u < h.n ? x + h.n : x;
        if (w == parent[u]) continue;
        if (dist[w] >= 0) {
          const int len = dist[u] + dist[w] + 1;
          if (best == 0 || len < best) best = len;
          continue;
        }
        dist[w] = dist[u] + 1;
        parent[w] = u;
        touched.push_back(w);
        queue.push_back(w);
      }
    }
  }
  return best;
}

long count_four_cycles(const SparseMatrix& h) {
  std::vector<int> shared(h.m, 0);
  std::vector<int> hit;
  long cycles = 0;
  for (int r = 0; r < h.m; ++r) {
    hit.clear();
    for (int c : h.rows[r]) {
      for (int r2 : h.cols[c]) {
        if (r2 <= r) continue;
        if (shared[r2]++ == 0) hit.push_back(r2);
      }
    }
    for (int r2 : hit) {
      const long s = shared[r2];
      cycles += s * (s - 1) / 2;
      shared[r2] = 0;
    }
  }
  return cycles;
}

MeasuredProfile measure_profile(const SparseMatrix& h) {
  h.check();
  const int me = std::max(1, h.classes());
  MeasuredProfile out;
  out.node_counts.assign(me, {});
  for (int c = 0; c < h.n; ++c) ++out.node_counts[h.class_of_column[c]][static_cast<int>(h.cols[c].size())];
  std::vector<long> edges(me, 0);
  for (int j = 0; j < me; ++j) {
    out.lambdas.push_back(lambda_from_counts(out.node_counts[j]));
    for (const auto& [deg, cnt] : out.node_counts[j]) edges[j] += static_cast<long>(deg) * cnt;
  }
  out.row_quotas.assign(h.m, CheckQuota(me, 0));
  for (int r = 0; r < h.m; ++r) {
    for (int c : h.rows[r]) ++out.row_quotas[r][h.class_of_column[c]];
  }
  for (const auto& q : out.row_quotas) out.joint[q] += 1.0 / h.m;
  out.rho.assign(me, {});
  for (const auto& q : out.row_quotas) {
    for (int j = 0; j < me; ++j) {
      if (q[j] > 0 && edges[j] > 0) out.rho[j][q[j]] += static_cast<double>(q[j]) / edges[j];
    }
  }
  out.girth = girth(h);
  out.four_cycles = count_four_cycles(h);
  out.sockets_balanced = validate(make_ensemble(out.node_counts, h.n, out.joint, h.m)).empty();
  return out;
}

}  // namespace uep::code
