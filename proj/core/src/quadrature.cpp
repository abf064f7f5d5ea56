#include "fracspde/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace fracspde::quad {

namespace {

QuadratureRule compute_gauss_legendre(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("Gauss-Legendre rule needs a < b");
  QuadratureRule rule = gauss_legendre(n);
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = center + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

double composite_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                std::size_t n, std::size_t panels) {
  if (panels == 0) throw std::invalid_argument("composite rule needs at least one panel");
  const QuadratureRule& ref = gauss_legendre(n);
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + static_cast<double>(p) * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += ref.weights[i] * f(center + half * ref.nodes[i]);
    total += sum * half;
  }
  return total;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& opts) {
  AdaptiveResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  if (!(b > a)) throw std::invalid_argument("adaptive quadrature needs a <= b");

  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  result.evaluations = 15;

  while (heap.size() < opts.max_intervals) {
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
      result.converged = true;
      break;
    }
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval no longer divisible
    heap.pop();
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to drop the accumulated update error.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = error;
  if (!result.converged) result.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return result;
}

}  // namespace fracspde::quad
