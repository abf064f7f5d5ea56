#include "fracspde/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracspde::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 100000;

// e^{-x} sum_n x^n / (a (a+1) ... (a+n)); equals gamma(a, x) / x^a.
double scaled_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * kEps * 0.25) break;
  }
  return sum * std::exp(-x);
}

// Continued fraction for Gamma(a, x) e^{x} x^{-a} (modified Lentz).
double upper_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

void check(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("incomplete gamma: a must be positive");
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("incomplete gamma: x must be non-negative");
}

}  // namespace

double gamma_p(double a, double x) {
  check(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(a * std::log(x) - std::lgamma(a)) * scaled_series(a, x);
  return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
  check(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p(a, x);
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * upper_cf(a, x);
}

double lower_incomplete_gamma(double a, double x) {
  check(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::pow(x, a) * scaled_series(a, x);
  return std::tgamma(a) * gamma_p(a, x);
}

double scaled_lower_gamma(double a, double x) {
  check(a, x);
  if (x == 0.0) return 1.0 / a;
  if (x < a + 1.0) return scaled_series(a, x);
  // gamma(a, x) = Gamma(a) - Gamma(a, x), with Gamma(a, x) <= Gamma(a) / 2 here.
  const double upper_scaled = std::exp(-x) * upper_cf(a, x);  // Gamma(a, x) / x^a
  return std::exp(std::lgamma(a) - a * std::log(x)) - upper_scaled;
}

}  // namespace fracspde::special
