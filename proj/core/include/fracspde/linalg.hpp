#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracspde::linalg {

/// Lower-triangular Cholesky factor of a symmetric n x n row-major matrix.
struct CholeskyFactor {
  std::size_t n = 0;
  std::vector<double> lower;  // row-major, upper triangle zero
  double jitter = 0.0;        // diagonal shift that was needed (0 if none)

  double operator()(std::size_t i, std::size_t j) const { return lower[i * n + j]; }

  /// out = L z.
  void apply(std::span<const double> z, std::span<double> out) const;
};

/// Factorises A. On failure retries once with A + eps I, eps = 1e-12 trace(A);
/// throws FactorizationError if that also fails.
CholeskyFactor cholesky(std::span<const double> a, std::size_t n);

}  // namespace fracspde::linalg
