#include "fracspde/linalg.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "fracspde/error.hpp"

namespace fracspde::linalg {

namespace {

std::optional<std::vector<double>> try_cholesky(std::span<const double> a, std::size_t n, double shift) {
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j] + shift;
    for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
    if (!(diag > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(diag);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / ljj;
    }
  }
  return l;
}

}  // namespace

void CholeskyFactor::apply(std::span<const double> z, std::span<double> out) const {
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k <= i; ++k) v += lower[i * n + k] * z[k];
    out[i] = v;
  }
}

CholeskyFactor cholesky(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("cholesky: matrix size mismatch");
  CholeskyFactor f;
  f.n = n;
  if (auto l = try_cholesky(a, n, 0.0)) {
    f.lower = std::move(*l);
    return f;
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i];
  const double eps = 1e-12 * trace;
  if (auto l = try_cholesky(a, n, eps)) {
    f.lower = std::move(*l);
    f.jitter = eps;
    return f;
  }
  throw FactorizationError("matrix is not positive definite within the jitter budget");
}

}  // namespace fracspde::linalg
