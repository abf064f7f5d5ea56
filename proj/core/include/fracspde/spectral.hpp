#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace fracspde {

/// Unit hypercube [0,1]^d with zero Dirichlet boundary.
struct RectangleDomain {
  int d = 2;
};

/// Unit sphere; points are (colatitude theta in [0, pi], longitude phi).
struct SphereDomain {};

using Domain = std::variant<RectangleDomain, SphereDomain>;

int spatial_dimension(const Domain& domain);

/// Rectangle: index = (i_1, ..., i_d) with i_q >= 1.
/// Sphere: index = (l, m) with -l <= m <= l; m > 0 is the cosine harmonic and
/// m < 0 the sine harmonic of order |m|.
struct EigenEntry {
  std::array<int, 3> index{};
  double xi = 0.0;
};

/// Laplacian eigenpairs sorted by non-decreasing eigenvalue.
class EigenBasis {
 public:
  EigenBasis(Domain domain, std::vector<EigenEntry> entries);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return entries_.size(); }
  std::span<const EigenEntry> entries() const { return entries_; }
  double eigenvalue(std::size_t k) const { return entries_[k].xi; }
  /// Coordinates per point: d for a rectangle, 2 for the sphere.
  int point_dim() const;

  double evaluate(std::size_t k, std::span<const double> x) const;
  /// out[k] = e_k(x) for k < out.size().
  void evaluate_all(std::span<const double> x, std::span<double> out) const;

  EigenBasis truncated(std::size_t M) const;

 private:
  Domain domain_;
  std::vector<EigenEntry> entries_;
  int max_degree_ = 0;  // sphere only
};

/// First M Dirichlet eigenpairs of -Laplace on [0,1]^d, d in {1,2,3}; ties
/// broken lexicographically on the multi-index.
EigenBasis eigen_rectangle(int d, std::size_t M);

/// First M real orthonormal spherical harmonics: degrees ascending, and within
/// a degree m = 0, +1, -1, +2, -2, ...
EigenBasis eigen_sphere(std::size_t M);

/// A = r^{-1} (kappa^2 - Laplace)^alpha, Q = sigma^2 r^{-2 gamma} (kappa^2 - Laplace)^{-beta}.
struct SpdeParams {
  double gamma = 1.5;
  double alpha = 0.5;
  double beta = 1.0;
  double kappa = 1.0;
  double r = 1.0;
  double sigma = 1.0;
  int d = 2;

  /// nu_s = beta + (2 gamma - 1) alpha - d/2.
  double nu_s() const;
  bool exists() const { return nu_s() > 0.0; }
  /// Throws std::invalid_argument on non-positive parameters, ModelError when nu_s <= 0.
  void validate() const;
};

/// Smoothness / range / non-separability parametrisation.
struct RangeParams {
  double nu_s = 1.0;
  double nu_t = 1.0;
  double r_s = 1.0;
  double r_t = 1.0;
  double beta_s = 0.5;
  double sigma = 1.0;
};

RangeParams to_range(const SpdeParams& sp);
SpdeParams to_spde(const RangeParams& rp, int d);

struct ModeSpectrum {
  std::vector<double> mu;
  std::vector<double> lambda;
};

/// mu_k = r^{-1} (kappa^2 + xi_k)^alpha, lambda_k = sigma^2 r^{-2 gamma} (kappa^2 + xi_k)^{-beta}.
ModeSpectrum mu_lambda(const SpdeParams& params, const EigenBasis& basis);

struct TheoryRates {
  double r_mu = 0.0;
  double r_lambda = 0.0;
  double nu = 0.0;
  double spatial_mse_order = 0.0;   // in M: E||X - X_M||^2 ~ M^{-2 nu / d}
  double temporal_mse_order = 0.0;  // in h: min(2 gamma - 1, 2m + 2)
  double delta = 0.0;
  double b = 0.0;
  double zeta = 0.0;            // balancing exponent, h = M^{-zeta}
  double cost_exponent = 0.0;   // cost ~ J eps^{-cost_exponent}
  bool log_factor = false;      // gamma == m + 3/2
};

TheoryRates theory_rates(const SpdeParams& sp, int m);

}  // namespace fracspde
