#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "fracspde/mesh.hpp"

namespace fracspde {

/// The singular kernel f_t(s) = (t - s)^{gamma - 1} on [0, t).
struct KernelSpec {
  double gamma = 1.0;
  double t = 1.0;

  double operator()(double s) const;
  void validate() const;  // gamma > 1/2, t > 0
};

inline constexpr int kMaxPolyOrder = 3;

/// Piecewise-constant surrogate sampled at t_{ell-1} + theta * h_ell.
struct LeftPoint {
  double theta = 0.0;
};

/// Per-interval L2-orthogonal projection onto polynomials of degree m.
struct Projection {
  int m = 1;
};

using Scheme = std::variant<LeftPoint, Projection>;

int scheme_order(const Scheme& scheme);

/// Per-interval monomial coefficients b_{ell,0..m} of a piecewise polynomial
/// on the first n intervals of a mesh: on [t_{ell-1}, t_ell) the value is
/// sum_j b_{ell,j} s^j.
class PiecewisePoly {
 public:
  PiecewisePoly(int order, std::size_t intervals);

  int order() const { return order_; }
  std::size_t intervals() const { return intervals_; }

  /// Coefficients for interval ell (1-based).
  std::span<double> coeffs(std::size_t ell) {
    return {coeffs_.data() + (ell - 1) * stride(), stride()};
  }
  std::span<const double> coeffs(std::size_t ell) const {
    return {coeffs_.data() + (ell - 1) * stride(), stride()};
  }

  double evaluate_on(std::size_t ell, double s) const;
  /// Evaluates at s in [0, t_n) by locating its interval on `mesh`.
  double evaluate(const TemporalMesh& mesh, double s) const;

 private:
  std::size_t stride() const { return static_cast<std::size_t>(order_) + 1; }

  int order_;
  std::size_t intervals_;
  std::vector<double> coeffs_;
};

/// i_k = int_a^b s^k (t - s)^{gamma-1} ds for k = 0..max_order, by the
/// binomial closed form; any order whose alternating sum cancels more than six
/// digits is recomputed by adaptive quadrature.
std::vector<double> kernel_moments(const KernelSpec& spec, double a, double b, int max_order);

/// Orthonormal shifted Legendre basis of P_m([a, b)), as monomial coefficients:
/// result[l][j] is the s^j coefficient of q_l.
std::vector<std::vector<double>> legendre_orthonormal(double a, double b, int m);

/// Monomial coefficients of the L2([a, b)) projection of f_t onto P_m. Moments
/// are taken in the local variable of [a, b) and shifted to monomials in long
/// double; for narrow intervals far from 0 the monomial form itself still loses
/// about (2 / (b - a))^m ulps.
std::vector<double> project_kernel(const KernelSpec& spec, double a, double b, int m);

/// b_{ell,0} = (t_n - t_{ell-1} - theta h_ell)^{gamma - 1} for ell = 1..n.
PiecewisePoly leftpoint_kernel(double gamma, const TemporalMesh& mesh, std::size_t n, double theta);

/// Surrogate of f_{t_n} on [0, t_n) for either scheme.
PiecewisePoly build_quadrature_poly(double gamma, const TemporalMesh& mesh, std::size_t n,
                                    const Scheme& scheme);

}  // namespace fracspde
