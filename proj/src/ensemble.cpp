#include "uep/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace uep {

std::pair<double, double> derivative_counts(const MultiEdgeEnsemble& ens, int i) {
  if (i < 0 || i >= ens.edge_types) {
    throw DomainError("derivative_counts: edge type " + std::to_string(i) + " out of range [0, " +
                      std::to_string(ens.edge_types) + ")");
  }
  double lx = 0.0;
  for (const auto& v : ens.var_types) {
    if (static_cast<int>(v.edges.size()) > i) lx += v.edges[i] * v.fraction;
  }
  double rx = 0.0;
  for (const auto& c : ens.check_types) {
    if (static_cast<int>(c.edges.size()) > i) rx += c.edges[i] * c.fraction;
  }
  return {lx, rx};
}

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::Dimension: return "Dimension";
    case Violation::Kind::NegativeFraction: return "NegativeFraction";
    case Violation::Kind::VariableSum: return "VariableSum";
    case Violation::Kind::ReceivedVector: return "ReceivedVector";
    case Violation::Kind::MixedVariable: return "MixedVariable";
    case Violation::Kind::SocketMismatch: return "SocketMismatch";
  }
  return "Unknown";
}

std::vector<Violation> validate(const MultiEdgeEnsemble& ens, double tol) {
  std::vector<Violation> out;
  const auto me = static_cast<std::size_t>(ens.edge_types);
  const auto mr = static_cast<std::size_t>(ens.received_types);

  double lsum = 0.0;
  for (std::size_t r = 0; r < ens.var_types.size(); ++r) {
    const auto& v = ens.var_types[r];
    const int row = static_cast<int>(r);
    if (v.edges.size() != me || v.received.size() != mr + 1) {
      out.push_back({Violation::Kind::Dimension, row, "variable type has wrong vector lengths"});
      continue;
    }
    if (v.fraction < 0.0) {
      out.push_back({Violation::Kind::NegativeFraction, row, "negative L_bd"});
    }
    lsum += v.fraction;
    const auto ones = std::count(v.received.begin(), v.received.end(), 1);
    const auto zeros = std::count(v.received.begin(), v.received.end(), 0);
    if (ones != 1 || ones + zeros != static_cast<long>(v.received.size())) {
      out.push_back({Violation::Kind::ReceivedVector, row, "b must have exactly one entry equal to 1"});
    }
    const auto nonzero = std::count_if(v.edges.begin(), v.edges.end(), [](int x) { return x != 0; });
    const bool negative = std::any_of(v.edges.begin(), v.edges.end(), [](int x) { return x < 0; });
    if (nonzero != 1 || negative) {
      out.push_back({Violation::Kind::MixedVariable, row, "variable node must use exactly one edge type"});
    }
  }
  if (std::abs(lsum - 1.0) > tol) {
    std::ostringstream os;
    os << "sum of L_bd is " << lsum;
    out.push_back({Violation::Kind::VariableSum, -1, os.str()});
  }

  bool check_dims_ok = true;
  for (std::size_t r = 0; r < ens.check_types.size(); ++r) {
    const auto& c = ens.check_types[r];
    if (c.edges.size() != me) {
      out.push_back({Violation::Kind::Dimension, static_cast<int>(r), "check type has wrong length"});
      check_dims_ok = false;
    }
    if (c.fraction < 0.0) {
      out.push_back({Violation::Kind::NegativeFraction, static_cast<int>(r), "negative R_d"});
    }
  }

  if (check_dims_ok) {
    for (int i = 0; i < ens.edge_types; ++i) {
      const auto [lx, rx] = derivative_counts(ens, i);
      if (std::abs(lx - rx) > tol) {
        std::ostringstream os;
        os << "L_x = " << lx << " but R_x = " << rx;
        out.push_back({Violation::Kind::SocketMismatch, i, os.str()});
      }
    }
  }
  return out;
}

TypeDistribution check_edge_fraction(const MultiEdgeEnsemble& ens, int j) {
  const auto rx = derivative_counts(ens, j).second;
  if (!(rx > 0.0)) {
    throw DomainError("check_edge_fraction: class " + std::to_string(j) + " has no check sockets");
  }
  TypeDistribution out;
  for (const auto& c : ens.check_types) {
    if (c.edges[j] == 0) continue;
    out[c.edges] += c.edges[j] * c.fraction / rx;
  }
  return out;
}

SocketProfile aggregate_by_socket(const TypeDistribution& rho_d, int j) {
  SocketProfile out;
  for (const auto& [d, r] : rho_d) {
    if (d[j] > 0) out[d[j]] += r;
  }
  return out;
}

double ClassLambda::average_degree() const {
  double acc = 0.0;
  for (const auto& [i, l] : coeffs) acc += i * l;
  return acc;
}

double ClassLambda::node_average_degree() const {
  double inv = 0.0;
  for (const auto& [i, l] : coeffs) inv += l / i;
  return inv > 0.0 ? 1.0 / inv : 0.0;
}

std::vector<long> largest_remainder(const std::vector<double>& weights, long total) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<long> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  long assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = wsum > 0.0 ? weights[i] / wsum * static_cast<double>(total) : 0.0;
    out[i] = static_cast<long>(std::floor(exact + 1e-12));
    assigned += out[i];
    rem.emplace_back(exact - static_cast<double>(out[i]), i);
  }
  // Stable: larger remainder first, then lower index.
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && r < rem.size(); ++r, ++assigned) {
    ++out[rem[r].second];
  }
  return out;
}

void ClassPartition::check() const {
  if (n <= 0 || k < 0 || k >= n) throw DomainError("partition: need 0 <= k < n");
  double s = 0.0;
  for (double a : info_fractions) {
    if (a < 0.0) throw DomainError("partition: negative class fraction");
    s += a;
  }
  if (!info_fractions.empty() && std::abs(s - 1.0) > 1e-9) {
    throw DomainError("partition: information class fractions must sum to 1");
  }
}

std::vector<int> ClassPartition::class_sizes() const {
  check();
  std::vector<int> sizes;
  if (info_fractions.empty()) {
    sizes.push_back(n);
    return sizes;
  }
  for (long v : largest_remainder(info_fractions, k)) sizes.push_back(static_cast<int>(v));
  sizes.push_back(n - k);
  return sizes;
}

std::vector<long> ClassSplit::edge_counts() const {
  std::vector<long> out;
  for (const auto& counts : node_counts) {
    long e = 0;
    for (const auto& [deg, c] : counts) e += static_cast<long>(deg) * c;
    out.push_back(e);
  }
  return out;
}

long ClassSplit::total_edges() const {
  const auto e = edge_counts();
  return std::accumulate(e.begin(), e.end(), 0L);
}

EdgeDistribution lambda_from_counts(const std::map<int, int>& counts) {
  long edges = 0;
  for (const auto& [deg, c] : counts) edges += static_cast<long>(deg) * c;
  EdgeDistribution out;
  if (edges == 0) return out;
  for (const auto& [deg, c] : counts) {
    if (c > 0) out[deg] = static_cast<double>(deg) * c / static_cast<double>(edges);
  }
  return out;
}

ClassSplit derive_class_lambdas(const EdgeDistribution& lambda_global, const ClassPartition& part,
                                int dc_max) {
  part.check();
  if (dc_max < 2) throw DomainError("derive_class_lambdas: d_c must be at least 2");
  double lsum = 0.0;
  for (const auto& [deg, l] : lambda_global) {
    if (deg < 1 || l < 0.0) throw DomainError("derive_class_lambdas: invalid lambda coefficient");
    lsum += l;
  }
  if (std::abs(lsum - 1.0) > 1e-6) throw DomainError("derive_class_lambdas: lambda must sum to 1");

  // Nominal edge count of a check-regular graph with n - k checks.
  const double edges = static_cast<double>(dc_max) * part.check_count();
  ClassSplit out;
  long placed = 0;
  int absorber = -1;
  double best_frac = -1.0;
  for (const auto& [deg, l] : lambda_global) {
    if (l <= 0.0) continue;
    const double exact = edges * l / deg;
    const long rounded = std::lround(exact);
    out.global_counts[deg] = static_cast<int>(rounded);
    placed += rounded;
    const double frac = exact - std::floor(exact);
    if (frac > best_frac) {
      best_frac = frac;
      absorber = deg;
    }
  }
  // The count whose exact value was furthest from an integer below it takes
  // the whole residual so that the block holds exactly n nodes.
  out.residual = static_cast<int>(part.n - placed);
  if (out.residual != 0) {
    out.global_counts[absorber] += out.residual;
    if (out.global_counts[absorber] < 0) {
      throw DomainError("derive_class_lambdas: residual exceeds the absorbing degree count");
    }
  }

  const auto sizes = part.class_sizes();
  out.node_counts.assign(sizes.size(), {});
  auto remaining = out.global_counts;
  auto it = remaining.rbegin();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    int need = sizes[c];
    while (need > 0) {
      while (it != remaining.rend() && it->second == 0) ++it;
      if (it == remaining.rend()) throw DomainError("derive_class_lambdas: degrees exhausted");
      const int take = std::min(need, it->second);
      out.node_counts[c][it->first] += take;
      it->second -= take;
      need -= take;
    }
  }

  for (std::size_t c = 0; c < sizes.size(); ++c) {
    ClassLambda cl;
    cl.class_index = static_cast<int>(c);
    cl.coeffs = sizes.size() == 1 ? lambda_global : lambda_from_counts(out.node_counts[c]);
    if (cl.coeffs.empty()) throw DomainError("derive_class_lambdas: empty class " + std::to_string(c));
    out.lambdas.push_back(std::move(cl));
  }
  return out;
}

MultiEdgeEnsemble make_ensemble(const std::vector<std::map<int, int>>& node_counts, int n,
                                const TypeDistribution& check_types, int m) {
  MultiEdgeEnsemble ens;
  ens.edge_types = static_cast<int>(node_counts.size());
  for (std::size_t j = 0; j < node_counts.size(); ++j) {
    for (const auto& [deg, c] : node_counts[j]) {
      if (c == 0) continue;
      VariableType v;
      v.received = {0, 1};
      v.edges.assign(node_counts.size(), 0);
      v.edges[j] = deg;
      v.fraction = static_cast<double>(c) / n;
      ens.var_types.push_back(std::move(v));
    }
  }
  for (const auto& [d, frac] : check_types) {
    ens.check_types.push_back({d, frac * m / n});
  }
  return ens;
}

}  // namespace uep
