#include "uep/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "uep/jfunction.hpp"

namespace uep::mi {
namespace {

double incoming_sq(double iv, bool own, CrossTermForm form) {
  const double x = std::clamp(iv, 0.0, 1.0);
  const double s = (own || form == CrossTermForm::Dual) ? j_inv(1.0 - x) : j_inv(x);
  return s * s;
}

double channel_sq(double sigma2) {
  if (!(sigma2 > 0.0)) return std::numeric_limits<double>::infinity();
  return 4.0 / sigma2;
}

}  // namespace

double var_update_regular(double sigma2, int dv, double ic_prev) {
  if (dv < 1) throw DomainError("var_update_regular: d_v must be >= 1");
  const double a = j_inv(std::clamp(ic_prev, 0.0, 1.0));
  return j_fun(std::sqrt(channel_sq(sigma2) + (dv - 1) * a * a));
}

double check_update_regular(const DegreeVector& d, int j, std::span<const double> iv, CrossTermForm form) {
  if (j < 0 || j >= static_cast<int>(d.size()) || d[j] < 1) {
    throw DomainError("check_update_regular: class has no socket on this check");
  }
  if (iv.size() < d.size()) throw DomainError("check_update_regular: missing class MI");
  double acc = (d[j] - 1) * incoming_sq(iv[j], true, form);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (static_cast<int>(i) == j || d[i] == 0) continue;
    acc += d[i] * incoming_sq(iv[i], false, form);
  }
  return 1.0 - j_fun(std::sqrt(acc));
}

double var_update_class(double sigma2, const ClassLambda& lam, double ic_prev) {
  const double a = j_inv(std::clamp(ic_prev, 0.0, 1.0));
  const double ch = channel_sq(sigma2);
  double out = 0.0;
  for (const auto& [deg, l] : lam.coeffs) {
    if (deg < 1) throw DomainError("var_update_class: degree must be >= 1");
    out += l * j_fun(std::sqrt(ch + (deg - 1) * a * a));
  }
  return std::clamp(out, 0.0, 1.0);
}

double var_update_class_inverse(double sigma2, const ClassLambda& lam, double target) {
  if (var_update_class(sigma2, lam, 0.0) >= target) return 0.0;
  if (var_update_class(sigma2, lam, 1.0) < target) return 2.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (var_update_class(sigma2, lam, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CheckProfileView CheckProfileView::from_types(const TypeDistribution& checks, int j) {
  CheckProfileView v;
  v.class_index = j;
  double total = 0.0;
  for (const auto& [d, f] : checks) total += d.at(j) * f;
  if (!(total > 0.0)) throw DomainError("CheckProfileView: class has no check sockets");
  for (const auto& [d, f] : checks) {
    if (d[j] == 0 || f <= 0.0) continue;
    CheckComponent c;
    c.weight = d[j] * f / total;
    c.sockets.assign(d.begin(), d.end());
    v.components.push_back(std::move(c));
  }
  return v;
}

SocketProfile CheckProfileView::aggregate() const {
  SocketProfile out;
  for (const auto& c : components) out[static_cast<int>(std::lround(c.sockets[class_index]))] += c.weight;
  return out;
}

void CheckProfileView::check(double tol) const {
  if (components.empty()) throw DomainError("CheckProfileView: empty profile");
  double s = 0.0;
  for (const auto& c : components) {
    if (c.weight < -tol) throw DomainError("CheckProfileView: negative weight");
    if (c.sockets.at(class_index) < 1.0) throw DomainError("CheckProfileView: component without own socket");
    s += c.weight;
  }
  if (std::abs(s - 1.0) > tol) throw DomainError("CheckProfileView: weights do not sum to 1");
}

std::vector<double> CrossSplit::sockets(int j, int s) const {
  const std::size_t me = edges.size();
  std::vector<double> out(me, 0.0);
  out[j] = s;
  double left = std::max(0.0, check_degree - s);
  double fixed_mean = 0.0;
  double free_mass = 0.0;
  double fixed_mass = 0.0;
  for (std::size_t i = 0; i < me; ++i) {
    if (static_cast<int>(i) == j) continue;
    if (fixed[i]) {
      fixed_mean += edges[i] / checks;
      fixed_mass += edges[i];
    } else {
      free_mass += edges[i];
    }
  }
  const double scale = fixed_mean > left ? left / fixed_mean : 1.0;
  for (std::size_t i = 0; i < me; ++i) {
    if (static_cast<int>(i) != j && fixed[i]) out[i] = scale * edges[i] / checks;
  }
  left -= scale * fixed_mean;
  if (left <= 0.0) return out;
  const bool to_free = free_mass > 0.0;
  const double mass = to_free ? free_mass : fixed_mass;
  if (!(mass > 0.0)) return out;
  for (std::size_t i = 0; i < me; ++i) {
    if (static_cast<int>(i) == j || fixed[i] == to_free) continue;
    out[i] += left * edges[i] / mass;
  }
  return out;
}

CheckProfileView view_from_aggregate(const SocketProfile& profile, int j, const CrossSplit& split) {
  CheckProfileView v;
  v.class_index = j;
  for (const auto& [s, r] : profile) {
    if (s < 1) throw DomainError("view_from_aggregate: socket count must be >= 1");
    if (r <= 0.0) continue;
    v.components.push_back({r, split.sockets(j, s)});
  }
  if (v.components.empty()) throw DomainError("view_from_aggregate: empty profile");
  return v;
}

std::vector<double> check_component_terms(const CheckProfileView& view, std::span<const double> iv,
                                          CrossTermForm form) {
  const int j = view.class_index;
  std::vector<double> sq(iv.size());
  for (std::size_t i = 0; i < iv.size(); ++i) sq[i] = incoming_sq(iv[i], static_cast<int>(i) == j, form);
  std::vector<double> out;
  out.reserve(view.components.size());
  for (const auto& c : view.components) {
    double acc = (c.sockets[j] - 1.0) * sq[j];
    for (std::size_t i = 0; i < c.sockets.size(); ++i) {
      if (static_cast<int>(i) != j) acc += c.sockets[i] * sq[i];
    }
    out.push_back(j_fun(std::sqrt(std::max(acc, 0.0))));
  }
  return out;
}

double check_update_class(const CheckProfileView& view, std::span<const double> iv, CrossTermForm form) {
  if (view.components.empty()) throw DomainError("check_update_class: empty profile");
  const auto terms = check_component_terms(view, iv, form);
  double acc = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) acc += view.components[k].weight * terms[k];
  return std::clamp(1.0 - acc, 0.0, 1.0);
}

DeTrace de_run(const DeInputs& in, double sigma2, int max_iter, double eps) {
  const std::size_t me = in.lambdas.size();
  if (in.views.size() != me) throw DomainError("de_run: need one check view per class");
  DeTrace trace;
  trace.sigma2 = sigma2;
  std::vector<double> ic(me, 0.0);
  std::vector<double> iv(me, 0.0);
  for (int l = 1; l <= max_iter; ++l) {
    double moved = 0.0;
    for (std::size_t j = 0; j < me; ++j) {
      const double next = var_update_class(sigma2, in.lambdas[j], ic[j]);
      moved = std::max(moved, std::abs(next - iv[j]));
      iv[j] = next;
    }
    for (std::size_t j = 0; j < me; ++j) {
      ic[j] = check_update_class(in.views[j], iv, in.form);
    }
    trace.records.push_back({iv, ic});
    trace.iterations_used = l;
    const bool done = std::all_of(iv.begin(), iv.end(), [&](double x) { return x >= 1.0 - eps; });
    if (done) {
      trace.converged = true;
      break;
    }
    if (l > 1 && moved < 1e-12) break;
  }
  return trace;
}

double threshold_search(const DeInputs& in, double sigma_lo, double sigma_hi, double tol, int max_iter,
                        double eps) {
  if (!(sigma_lo < sigma_hi) || !(tol > 0.0)) throw DomainError("threshold_search: bad bracket");
  if (!de_run(in, sigma_lo * sigma_lo, max_iter, eps).converged) {
    throw DomainError("threshold_search: density evolution does not converge at sigma_lo");
  }
  if (de_run(in, sigma_hi * sigma_hi, max_iter, eps).converged) return sigma_hi;
  double lo = sigma_lo;
  double hi = sigma_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (de_run(in, mid * mid, max_iter, eps).converged) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace uep::mi
