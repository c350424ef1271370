#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hallcal::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// Stops when the summed error estimate drops below max(abs_tol, rel_tol*|I|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                           double abs_tol = 0.0, int max_intervals = 2000);

/// Piecewise-linear interpolation on an increasing grid; constant outside.
double interp_linear(std::span<const double> x, std::span<const double> y, double xq);
std::vector<double> interp_linear(std::span<const double> x, std::span<const double> y, std::span<const double> xq);

/// Linear-interpolated sample quantile (type 7, as in numpy's default), q in [0, 1].
double quantile(std::vector<double> values, double q);
/// Quantile of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

/// Solve a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. Returns the solution in `rhs`.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag, std::span<const double> upper,
                       std::span<double> rhs);

}  // namespace hallcal::numerics
