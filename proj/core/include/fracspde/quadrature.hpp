#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracspde::quad {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are cached per n.
const QuadratureRule& gauss_legendre(std::size_t n);

/// n-point Gauss-Legendre rule mapped affinely onto [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Composite n-point Gauss-Legendre over `panels` equal panels of [a, b].
double composite_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                std::size_t n, std::size_t panels);

struct AdaptiveOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  std::size_t max_intervals = 4000;
};

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod: bisects the subinterval with
/// the largest error estimate until the total estimate meets the tolerance.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& opts = {});

}  // namespace fracspde::quad
