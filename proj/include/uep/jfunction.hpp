#pragma once

namespace uep::mi {

/// Largest argument accepted by j_inv; larger inputs are clamped to it.
inline constexpr double kIMax = 1.0 - 1e-12;

/// Table range of the interpolated J; beyond it J is taken as 1.
inline constexpr double kTableSigmaMax = 12.0;
inline constexpr int kTableKnots = 2048;

/// Mutual information between a BPSK bit and a consistent Gaussian LLR with
/// standard deviation sigma (mean sigma^2 / 2). Table-backed; absolute error
/// below 1e-7 against direct quadrature.
double j_fun(double sigma);

/// Inverse of j_fun by bisection to 1e-8 in sigma. Inputs >= 1 are clamped
/// to kIMax.
double j_inv(double mi);

/// Direct adaptive Gauss-Kronrod evaluation of J (no table).
double j_fun_quadrature(double sigma, double tol = 1e-10);

/// dJ/dsigma by the same quadrature.
double j_derivative_quadrature(double sigma, double tol = 1e-10);

/// Forces construction of the interpolation table (otherwise built lazily).
void warm_up();

}  // namespace uep::mi
