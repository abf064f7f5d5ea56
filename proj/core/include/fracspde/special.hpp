#pragma once

namespace fracspde::special {

/// Regularised lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction for Q otherwise.
double gamma_p(double a, double x);

/// Regularised upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Lower incomplete gamma gamma(a, x) = int_0^x e^{-u} u^{a-1} du.
double lower_incomplete_gamma(double a, double x);

/// gamma(a, x) / x^a, which is finite at x = 0 (value 1/a) and never
/// overflows for moderate a. Equals int_0^1 e^{-x v} v^{a-1} dv.
double scaled_lower_gamma(double a, double x);

}  // namespace fracspde::special
