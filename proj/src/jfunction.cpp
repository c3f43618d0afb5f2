#include "uep/jfunction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "uep/ensemble.hpp"

namespace uep::mi {
namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double value;
  double error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[i] * s;
    if (i % 2 == 1) gauss += kWg[i / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
  const auto seg = gk15(f, a, b);
  if (seg.error <= tol || depth > 40) return seg.value;
  const double c = 0.5 * (a + b);
  return integrate(f, a, c, 0.5 * tol, depth + 1) + integrate(f, c, b, 0.5 * tol, depth + 1);
}

double log2_1p_exp_neg(double x) {
  // log2(1 + e^{-x}) without overflow
  if (x >= 0.0) return std::log1p(std::exp(-x)) / std::numbers::ln2;
  return (-x + std::log1p(std::exp(x))) / std::numbers::ln2;
}

double logistic_neg(double x) {
  // e^{-x} / (1 + e^{-x})
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double half_width(double sigma) {
  // |xi - sigma^2/2| <= 10 sigma + 10, i.e. |z| <= 10 + 10 / sigma
  return std::min(10.0 + 10.0 / sigma, 40.0);
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

class JTable {
 public:
  JTable() : step_(kTableSigmaMax / (kTableKnots - 1)), value_(kTableKnots), slope_(kTableKnots) {
    for (int i = 0; i < kTableKnots; ++i) {
      const double s = i * step_;
      value_[i] = j_fun_quadrature(s, 1e-13);
      slope_[i] = j_derivative_quadrature(s, 1e-13);
    }
  }

  double operator()(double sigma) const {
    if (sigma <= 0.0) return 0.0;
    if (sigma >= kTableSigmaMax) return 1.0;
    const double pos = sigma / step_;
    const int i = std::min(static_cast<int>(pos), kTableKnots - 2);
    const double t = pos - i;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    const double v = h00 * value_[i] + h10 * step_ * slope_[i] + h01 * value_[i + 1] +
                     h11 * step_ * slope_[i + 1];
    // Hermite segments with exact end slopes stay within their end values here;
    // clamp to keep the table monotone under rounding.
    return std::clamp(v, value_[i], value_[i + 1]);
  }

 private:
  double step_;
  std::vector<double> value_;
  std::vector<double> slope_;
};

const JTable& table() {
  static const JTable t;
  return t;
}

}  // namespace

double j_fun_quadrature(double sigma, double tol) {
  if (sigma < 0.0 || std::isnan(sigma)) throw DomainError("J: sigma must be non-negative");
  if (sigma == 0.0) return 0.0;
  const double mean = 0.5 * sigma * sigma;
  const auto f = [&](double z) { return std_normal_pdf(z) * log2_1p_exp_neg(mean + sigma * z); };
  const double w = half_width(sigma);
  return 1.0 - integrate(f, -w, w, tol);
}

double j_derivative_quadrature(double sigma, double tol) {
  if (sigma < 0.0 || std::isnan(sigma)) throw DomainError("J': sigma must be non-negative");
  if (sigma == 0.0) return 0.0;
  const double mean = 0.5 * sigma * sigma;
  const auto f = [&](double z) {
    return std_normal_pdf(z) * (sigma + z) * logistic_neg(mean + sigma * z) / std::numbers::ln2;
  };
  const double w = half_width(sigma);
  return integrate(f, -w, w, tol);
}

double j_fun(double sigma) {
  if (sigma < 0.0 || std::isnan(sigma)) throw DomainError("J: sigma must be non-negative");
  return table()(sigma);
}

double j_inv(double mi) {
  if (std::isnan(mi)) throw DomainError("J^-1: NaN input");
  if (mi <= 0.0) return 0.0;
  const double target = std::min(mi, kIMax);
  const auto& t = table();
  double lo = 0.0;
  double hi = kTableSigmaMax;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (t(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void warm_up() { (void)table(); }

}  // namespace uep::mi
