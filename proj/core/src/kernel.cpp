#include "fracspde/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracspde/quadrature.hpp"

namespace fracspde {

namespace {

// Alternating-sum cancellation above this ratio triggers quadrature.
constexpr double kMaxCancellation = 1e6;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (y + delta)^p - y^p for y >= 0, delta > 0, without cancellation when y >> delta.
double power_difference(double y, double delta, double p) {
  if (y == 0.0) return std::pow(delta, p);
  if (y >= delta) return std::pow(y, p) * std::expm1(p * std::log1p(delta / y));
  return std::pow(y + delta, p) - std::pow(y, p);
}

double moment_by_quadrature(double gamma, double t, double a, double b, int k) {
  quad::AdaptiveOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-14;
  const double dist = t - b;
  if (gamma < 1.0 && dist < (b - a)) {
    // v = (t - s)^gamma absorbs the endpoint singularity: (t-s)^{gamma-1} ds = -dv / gamma.
    const double vlo = std::pow(dist, gamma);
    const double vhi = std::pow(t - a, gamma);
    auto integrand = [&](double v) {
      const double s = t - std::pow(v, 1.0 / gamma);
      return std::pow(s, k) / gamma;
    };
    return quad::integrate_adaptive(integrand, vlo, vhi, opts).value;
  }
  auto integrand = [&](double s) { return std::pow(s, k) * std::pow(t - s, gamma - 1.0); };
  return quad::integrate_adaptive(integrand, a, b, opts).value;
}

}  // namespace

double KernelSpec::operator()(double s) const { return std::pow(t - s, gamma - 1.0); }

void KernelSpec::validate() const {
  if (!(gamma > 0.5)) throw std::invalid_argument("kernel: gamma must exceed 1/2");
  if (!(t > 0.0)) throw std::invalid_argument("kernel: evaluation time must be positive");
}

int scheme_order(const Scheme& scheme) {
  if (const auto* p = std::get_if<Projection>(&scheme)) return p->m;
  return 0;
}

PiecewisePoly::PiecewisePoly(int order, std::size_t intervals)
    : order_(order), intervals_(intervals) {
  if (order < 0) throw std::invalid_argument("polynomial order must be non-negative");
  coeffs_.assign(intervals * stride(), 0.0);
}

double PiecewisePoly::evaluate_on(std::size_t ell, double s) const {
  const auto c = coeffs(ell);
  double value = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) value = value * s + c[j];
  return value;
}

double PiecewisePoly::evaluate(const TemporalMesh& mesh, double s) const {
  const auto nodes = mesh.nodes();
  if (s < 0.0 || s >= nodes[intervals_])
    throw std::invalid_argument("piecewise polynomial evaluated outside [0, t_n)");
  const auto it = std::upper_bound(nodes.begin(), nodes.begin() + intervals_ + 1, s);
  return evaluate_on(static_cast<std::size_t>(it - nodes.begin()), s);
}

std::vector<double> kernel_moments(const KernelSpec& spec, double a, double b, int max_order) {
  const double gamma = spec.gamma;
  const double t = spec.t;
  if (max_order < 0) throw std::invalid_argument("kernel_moments: negative order");
  if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("kernel_moments: need 0 <= a < b");
  if (b > t) throw std::domain_error("kernel_moments: interval end exceeds evaluation time");
  if (b == t && gamma <= 0.0)
    throw std::domain_error("kernel_moments: kernel not integrable at s = t for gamma <= 0");

  const double y = t - b;
  const double delta = b - a;
  std::vector<double> brackets(max_order + 1);
  bool degenerate = false;
  for (int j = 0; j <= max_order; ++j) {
    const double p = gamma + j;
    if (p == 0.0) degenerate = true;
    brackets[j] = degenerate ? 0.0 : power_difference(y, delta, p);
  }

  std::vector<double> moments(max_order + 1);
  for (int k = 0; k <= max_order; ++k) {
    double sum = 0.0;
    double magnitude = 0.0;
    for (int j = 0; j <= k && !degenerate; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      const double term = sign * binomial(k, j) * std::pow(t, k - j) / (gamma + j) * brackets[j];
      sum += term;
      magnitude += std::abs(term);
    }
    const bool cancelled = degenerate || magnitude > kMaxCancellation * std::abs(sum);
    moments[k] = cancelled ? moment_by_quadrature(gamma, t, a, b, k) : sum;
  }
  return moments;
}

std::vector<std::vector<double>> legendre_orthonormal(double a, double b, int m) {
  if (!(b > a)) throw std::invalid_argument("legendre_orthonormal: degenerate interval");
  if (m < 0) throw std::invalid_argument("legendre_orthonormal: negative order");

  // Legendre P_l on [-1, 1] in powers of x via Bonnet's recurrence.
  std::vector<std::vector<double>> ref(m + 1, std::vector<double>(m + 1, 0.0));
  ref[0][0] = 1.0;
  if (m >= 1) ref[1][1] = 1.0;
  for (int l = 1; l < m; ++l) {
    for (int j = 0; j <= m; ++j) {
      double v = -static_cast<double>(l) * ref[l - 1][j];
      if (j > 0) v += (2.0 * l + 1.0) * ref[l][j - 1];
      ref[l + 1][j] = v / (l + 1.0);
    }
  }

  // x = c1 s + c0 maps [a, b] onto [-1, 1].
  const double width = b - a;
  const double c1 = 2.0 / width;
  const double c0 = -(a + b) / width;
  std::vector<std::vector<double>> q(m + 1, std::vector<double>(m + 1, 0.0));
  for (int l = 0; l <= m; ++l) {
    const double norm = std::sqrt((2.0 * l + 1.0) / width);
    for (int i = 0; i <= l; ++i) {
      if (ref[l][i] == 0.0) continue;
      for (int r = 0; r <= i; ++r)
        q[l][r] += norm * ref[l][i] * binomial(i, r) * std::pow(c1, r) * std::pow(c0, i - r);
    }
  }
  return q;
}

std::vector<double> project_kernel(const KernelSpec& spec, double a, double b, int m) {
  if (m < 0 || m > kMaxPolyOrder)
    throw std::invalid_argument("project_kernel: order must lie in [0, " + std::to_string(kMaxPolyOrder) + "]");
  const double gamma = spec.gamma;
  const double t = spec.t;
  if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("project_kernel: need 0 <= a < b");
  if (b > t) throw std::domain_error("project_kernel: interval end exceeds evaluation time");
  if (!(gamma > 0.0)) throw std::domain_error("project_kernel: kernel not integrable for gamma <= 0");

  // Work in x in [-1, 1], s = mid + half x, where f_t(s) = half^{gamma-1} (c - x)^{gamma-1}
  // with c = (t - mid) / half >= 1. Moments of (c - x)^{gamma-1} are well conditioned there.
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double c = std::max((t - mid) / half, 1.0);
  std::array<double, kMaxPolyOrder + 1> mom{};
  if (c <= 3.0) {
    // y = c - x in [c - 1, c + 1]; expand x^k = (c - y)^k.
    std::array<double, kMaxPolyOrder + 1> ymom{};
    for (int j = 0; j <= m; ++j) ymom[j] = power_difference(c - 1.0, 2.0, gamma + j) / (gamma + j);
    for (int k = 0; k <= m; ++k) {
      double sum = 0.0;
      for (int j = 0; j <= k; ++j)
        sum += ((j % 2 == 0) ? 1.0 : -1.0) * binomial(k, j) * std::pow(c, k - j) * ymom[j];
      mom[k] = sum;
    }
  } else {
    // Singularity at least 2 half-widths away: 16-point Gauss-Legendre is exact to rounding.
    const auto& rule = quad::gauss_legendre(16);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i];
      double w = rule.weights[i] * std::pow(c - x, gamma - 1.0);
      for (int k = 0; k <= m; ++k, w *= x) mom[k] += w;
    }
  }

  // Legendre coefficients on [-1, 1], then the projection as a polynomial in x.
  static constexpr double P[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {-0.5, 0, 1.5, 0}, {0, -1.5, 0, 2.5}};
  std::array<long double, kMaxPolyOrder + 1> px{};
  for (int l = 0; l <= m; ++l) {
    double inner = 0.0;
    for (int k = 0; k <= l; ++k) inner += P[l][k] * mom[k];
    const double coef = (2.0 * l + 1.0) / 2.0 * inner;
    for (int k = 0; k <= l; ++k) px[k] += static_cast<long double>(coef) * P[l][k];
  }

  // Substitute x = (s - mid) / half; the shift is done in extended precision because the
  // monomial form in s is ill conditioned for narrow intervals far from the origin.
  const long double scale = std::pow(static_cast<long double>(half), static_cast<long double>(gamma) - 1.0L);
  const long double inv = 1.0L / static_cast<long double>(half);
  const long double shift = -static_cast<long double>(mid) * inv;
  std::array<long double, kMaxPolyOrder + 1> ps{};
  for (int i = 0; i <= m; ++i) {
    for (int r = 0; r <= i; ++r)
      ps[r] += px[i] * static_cast<long double>(binomial(i, r)) * std::pow(inv, static_cast<long double>(r)) *
               std::pow(shift, static_cast<long double>(i - r));
  }
  std::vector<double> alpha(m + 1);
  for (int j = 0; j <= m; ++j) alpha[j] = static_cast<double>(scale * ps[j]);
  return alpha;
}

PiecewisePoly leftpoint_kernel(double gamma, const TemporalMesh& mesh, std::size_t n, double theta) {
  KernelSpec{gamma, 1.0}.validate();
  if (n == 0 || n > mesh.intervals()) throw std::invalid_argument("leftpoint_kernel: node index out of range");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("leftpoint_kernel: theta must lie in [0, 1]");
  if (theta == 1.0 && gamma <= 1.0)
    throw std::invalid_argument("leftpoint_kernel: theta = 1 requires gamma > 1");
  PiecewisePoly poly(0, n);
  const double tn = mesh.node(n);
  for (std::size_t ell = 1; ell <= n; ++ell) {
    const double arg = tn - mesh.node(ell - 1) - theta * mesh.step(ell);
    poly.coeffs(ell)[0] = std::pow(std::max(arg, 0.0), gamma - 1.0);
  }
  return poly;
}

PiecewisePoly build_quadrature_poly(double gamma, const TemporalMesh& mesh, std::size_t n,
                                    const Scheme& scheme) {
  if (const auto* lp = std::get_if<LeftPoint>(&scheme)) return leftpoint_kernel(gamma, mesh, n, lp->theta);

  const int m = std::get<Projection>(scheme).m;
  if (m < 0 || m > kMaxPolyOrder) throw std::invalid_argument("projection order must lie in [0, 3]");
  if (n == 0 || n > mesh.intervals()) throw std::invalid_argument("build_quadrature_poly: node index out of range");
  const KernelSpec spec{gamma, mesh.node(n)};
  spec.validate();
  PiecewisePoly poly(m, n);
  for (std::size_t ell = 1; ell <= n; ++ell) {
    const auto alpha = project_kernel(spec, mesh.node(ell - 1), mesh.node(ell), m);
    std::copy(alpha.begin(), alpha.end(), poly.coeffs(ell).begin());
  }
  return poly;
}

}  // namespace fracspde
