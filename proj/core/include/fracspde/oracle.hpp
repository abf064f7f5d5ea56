#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fracspde/linalg.hpp"

namespace fracspde::oracle {

/// Var c(t) = lambda / Gamma(gamma)^2 * int_0^t e^{-2 mu u} u^{2 gamma - 2} du,
/// in closed form through the lower incomplete gamma function.
double exact_variance(double mu, double lambda, double gamma, double t);

/// Stationary limit of exact_variance as t -> infinity.
double stationary_variance(double mu, double lambda, double gamma);

/// Cov(c(t), c(tp)) for 0 <= t <= tp, by adaptive quadrature in u = t - s.
double exact_covariance(double mu, double lambda, double gamma, double t, double tp);

/// J x J covariance matrix (row-major) of c at the given times.
std::vector<double> covariance_matrix(double mu, double lambda, double gamma, std::span<const double> times);

/// Samples the exact coefficient process at up to 64 distinct times from a
/// factorised dense covariance.
class ReferenceSampler {
 public:
  static constexpr std::size_t kMaxTimes = 64;

  ReferenceSampler(double mu, double lambda, double gamma, std::vector<double> times);

  std::size_t size() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const double> covariance() const { return cov_; }
  const linalg::CholeskyFactor& factor() const { return factor_; }

  /// Replica r is drawn from substream r of the seed; out has replicas x J
  /// entries, row r holding that path.
  std::vector<double> sample(std::size_t replicas, std::uint64_t seed) const;

 private:
  std::vector<double> times_;
  std::vector<double> cov_;
  linalg::CholeskyFactor factor_;
};

std::vector<double> cholesky_reference(double mu, double lambda, double gamma, std::span<const double> times,
                                       std::size_t replicas, std::uint64_t seed);

}  // namespace fracspde::oracle
