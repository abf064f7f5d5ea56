#include "fracspde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracspde/quadrature.hpp"
#include "fracspde/rng.hpp"
#include "fracspde/special.hpp"

namespace fracspde::oracle {

namespace {

void check_model(double mu, double lambda, double gamma) {
  if (!(gamma > 0.5)) throw std::domain_error("gamma <= 1/2: the variance integral diverges");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be non-negative");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be non-negative");
}

}  // namespace

double exact_variance(double mu, double lambda, double gamma, double t) {
  check_model(mu, lambda, gamma);
  if (!(t >= 0.0)) throw std::invalid_argument("exact_variance: t must be non-negative");
  if (t == 0.0) return 0.0;
  const double a = 2.0 * gamma - 1.0;
  const double g = std::tgamma(gamma);
  return lambda / (g * g) * std::pow(t, a) * special::scaled_lower_gamma(a, 2.0 * mu * t);
}

double stationary_variance(double mu, double lambda, double gamma) {
  check_model(mu, lambda, gamma);
  if (!(mu > 0.0)) throw std::invalid_argument("stationary_variance: mu must be positive");
  const double a = 2.0 * gamma - 1.0;
  const double g = std::tgamma(gamma);
  return lambda * std::tgamma(a) / (g * g * std::pow(2.0 * mu, a));
}

double exact_covariance(double mu, double lambda, double gamma, double t, double tp) {
  check_model(mu, lambda, gamma);
  if (!(t >= 0.0) || !(tp >= t)) throw std::invalid_argument("exact_covariance: need 0 <= t <= tp");
  const double gap = tp - t;
  if (gap == 0.0) return exact_variance(mu, lambda, gamma, t);
  if (t == 0.0) return 0.0;

  // int_0^t e^{-2 mu u} u^{gamma-1} (u + gap)^{gamma-1} du, split at c = min(t, gap).
  // On [0, c] the substitution v = u^gamma absorbs u^{gamma-1} du = dv / gamma.
  const double gm1 = gamma - 1.0;
  const double c = std::min(t, gap);
  quad::AdaptiveOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-13;
  auto singular = [&](double v) {
    const double u = std::pow(v, 1.0 / gamma);
    return std::exp(-2.0 * mu * u) * std::pow(u + gap, gm1) / gamma;
  };
  double integral = quad::integrate_adaptive(singular, 0.0, std::pow(c, gamma), opts).value;
  if (c < t) {
    auto smooth = [&](double u) { return std::exp(-2.0 * mu * u) * std::pow(u * (u + gap), gm1); };
    integral += quad::integrate_adaptive(smooth, c, t, opts).value;
  }
  const double g = std::tgamma(gamma);
  return lambda / (g * g) * std::exp(-mu * gap) * integral;
}

std::vector<double> covariance_matrix(double mu, double lambda, double gamma, std::span<const double> times) {
  const std::size_t J = times.size();
  std::vector<double> cov(J * J);
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t j = i; j < J; ++j) {
      const double lo = std::min(times[i], times[j]);
      const double hi = std::max(times[i], times[j]);
      cov[i * J + j] = cov[j * J + i] = exact_covariance(mu, lambda, gamma, lo, hi);
    }
  return cov;
}

ReferenceSampler::ReferenceSampler(double mu, double lambda, double gamma, std::vector<double> times)
    : times_(std::move(times)) {
  if (times_.empty() || times_.size() > kMaxTimes)
    throw std::invalid_argument("reference sampler: between 1 and 64 output times");
  auto sorted = times_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("reference sampler: output times must be distinct");
  cov_ = covariance_matrix(mu, lambda, gamma, times_);
  factor_ = linalg::cholesky(cov_, times_.size());
}

std::vector<double> ReferenceSampler::sample(std::size_t replicas, std::uint64_t seed) const {
  const std::size_t J = times_.size();
  std::vector<double> out(replicas * J);
  std::vector<double> z(J);
  for (std::size_t r = 0; r < replicas; ++r) {
    rng::NormalStream stream(seed, 0, static_cast<std::uint32_t>(r));
    for (auto& v : z) v = stream.next();
    factor_.apply(z, std::span<double>(out.data() + r * J, J));
  }
  return out;
}

std::vector<double> cholesky_reference(double mu, double lambda, double gamma, std::span<const double> times,
                                       std::size_t replicas, std::uint64_t seed) {
  return ReferenceSampler(mu, lambda, gamma, std::vector<double>(times.begin(), times.end())).sample(replicas, seed);
}

}  // namespace fracspde::oracle
