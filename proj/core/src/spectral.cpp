#include "fracspde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracspde/error.hpp"

namespace fracspde {

namespace {

constexpr double kPi = std::numbers::pi;

// Fully normalised associated Legendre functions without the Condon-Shortley
// phase: table[l * (lmax + 1) + m] = Pbar_l^m(cos theta), so that
// Y_l^0 = Pbar_l^0 and the real harmonics of order m > 0 are
// sqrt(2) Pbar_l^m {cos, sin}(m phi).
void normalized_legendre(int lmax, double cos_t, double sin_t, std::vector<double>& table) {
  const int stride = lmax + 1;
  table.assign(static_cast<std::size_t>(stride * stride), 0.0);
  table[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= lmax; ++m)
    table[m * stride + m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t * table[(m - 1) * stride + (m - 1)];
  for (int m = 0; m < lmax; ++m)
    table[(m + 1) * stride + m] = std::sqrt(2.0 * m + 3.0) * cos_t * table[m * stride + m];
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = static_cast<double>(l);
      const double mm = static_cast<double>(m);
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      table[l * stride + m] = a * (cos_t * table[(l - 1) * stride + m] - b * table[(l - 2) * stride + m]);
    }
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

int spatial_dimension(const Domain& domain) {
  if (const auto* rect = std::get_if<RectangleDomain>(&domain)) return rect->d;
  return 2;
}

EigenBasis::EigenBasis(Domain domain, std::vector<EigenEntry> entries)
    : domain_(std::move(domain)), entries_(std::move(entries)) {
  for (const auto& e : entries_)
    if (std::holds_alternative<SphereDomain>(domain_)) max_degree_ = std::max(max_degree_, e.index[0]);
}

int EigenBasis::point_dim() const {
  if (const auto* rect = std::get_if<RectangleDomain>(&domain_)) return rect->d;
  return 2;
}

double EigenBasis::evaluate(std::size_t k, std::span<const double> x) const {
  const EigenEntry& e = entries_.at(k);
  if (const auto* rect = std::get_if<RectangleDomain>(&domain_)) {
    double v = 1.0;
    for (int q = 0; q < rect->d; ++q) v *= std::numbers::sqrt2 * std::sin(e.index[q] * kPi * x[q]);
    return v;
  }
  const int l = e.index[0];
  const int m = e.index[1];
  std::vector<double> table;
  normalized_legendre(l, std::cos(x[0]), std::sin(x[0]), table);
  const double p = table[l * (l + 1) + std::abs(m)];
  if (m == 0) return p;
  if (m > 0) return std::numbers::sqrt2 * p * std::cos(m * x[1]);
  return std::numbers::sqrt2 * p * std::sin(-m * x[1]);
}

void EigenBasis::evaluate_all(std::span<const double> x, std::span<double> out) const {
  const std::size_t count = std::min(out.size(), entries_.size());
  if (const auto* rect = std::get_if<RectangleDomain>(&domain_)) {
    int imax = 0;
    for (std::size_t k = 0; k < count; ++k)
      for (int q = 0; q < rect->d; ++q) imax = std::max(imax, entries_[k].index[q]);
    std::vector<double> sines(static_cast<std::size_t>(rect->d * (imax + 1)));
    for (int q = 0; q < rect->d; ++q)
      for (int i = 1; i <= imax; ++i) sines[q * (imax + 1) + i] = std::numbers::sqrt2 * std::sin(i * kPi * x[q]);
    for (std::size_t k = 0; k < count; ++k) {
      double v = 1.0;
      for (int q = 0; q < rect->d; ++q) v *= sines[q * (imax + 1) + entries_[k].index[q]];
      out[k] = v;
    }
    return;
  }
  int lmax = 0;
  for (std::size_t k = 0; k < count; ++k) lmax = std::max(lmax, entries_[k].index[0]);
  std::vector<double> table;
  normalized_legendre(lmax, std::cos(x[0]), std::sin(x[0]), table);
  std::vector<double> cosm(lmax + 1), sinm(lmax + 1);
  for (int m = 0; m <= lmax; ++m) {
    cosm[m] = std::cos(m * x[1]);
    sinm[m] = std::sin(m * x[1]);
  }
  for (std::size_t k = 0; k < count; ++k) {
    const int l = entries_[k].index[0];
    const int m = entries_[k].index[1];
    const double p = table[l * (lmax + 1) + std::abs(m)];
    if (m == 0)
      out[k] = p;
    else if (m > 0)
      out[k] = std::numbers::sqrt2 * p * cosm[m];
    else
      out[k] = std::numbers::sqrt2 * p * sinm[-m];
  }
}

EigenBasis EigenBasis::truncated(std::size_t M) const {
  if (M == 0 || M > entries_.size()) throw std::invalid_argument("truncation size out of range");
  return EigenBasis(domain_, std::vector<EigenEntry>(entries_.begin(), entries_.begin() + static_cast<long>(M)));
}

EigenBasis eigen_rectangle(int d, std::size_t M) {
  if (d < 1 || d > 3) throw std::invalid_argument("eigen_rectangle: d must be 1, 2 or 3");
  if (M == 0) throw std::invalid_argument("eigen_rectangle: M must be at least 1");

  // Enumerate every multi-index with sum of squares <= bound, growing the
  // bound until at least M are found; the first M after sorting are then exact.
  long bound = 1;
  std::vector<std::pair<long, std::array<int, 3>>> found;
  for (;;) {
    found.clear();
    const int imax = static_cast<int>(std::sqrt(static_cast<double>(bound))) + 1;
    const int jmax = d >= 2 ? imax : 1;
    const int kmax = d >= 3 ? imax : 1;
    for (int i = 1; i <= imax; ++i)
      for (int j = 1; j <= jmax; ++j)
        for (int k = 1; k <= kmax; ++k) {
          long s = static_cast<long>(i) * i;
          if (d >= 2) s += static_cast<long>(j) * j;
          if (d >= 3) s += static_cast<long>(k) * k;
          if (s <= bound) found.push_back({s, {i, d >= 2 ? j : 0, d >= 3 ? k : 0}});
        }
    if (found.size() >= M) break;
    bound *= 2;
  }
  std::sort(found.begin(), found.end());
  std::vector<EigenEntry> entries(M);
  for (std::size_t n = 0; n < M; ++n) {
    entries[n].index = found[n].second;
    entries[n].xi = kPi * kPi * static_cast<double>(found[n].first);
  }
  return EigenBasis(RectangleDomain{d}, std::move(entries));
}

EigenBasis eigen_sphere(std::size_t M) {
  if (M == 0) throw std::invalid_argument("eigen_sphere: M must be at least 1");
  std::vector<EigenEntry> entries;
  entries.reserve(M);
  for (int l = 0; entries.size() < M; ++l) {
    const double xi = static_cast<double>(l) * (l + 1);
    entries.push_back({{l, 0, 0}, xi});
    for (int m = 1; m <= l && entries.size() < M; ++m) {
      entries.push_back({{l, m, 0}, xi});
      if (entries.size() < M) entries.push_back({{l, -m, 0}, xi});
    }
  }
  return EigenBasis(SphereDomain{}, std::move(entries));
}

double SpdeParams::nu_s() const { return beta + (2.0 * gamma - 1.0) * alpha - 0.5 * d; }

void SpdeParams::validate() const {
  if (!(gamma > 0.5)) throw std::invalid_argument("gamma must exceed 1/2");
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(kappa, "kappa");
  check_positive(r, "r");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be non-negative");
  if (d < 1 || d > 3) throw std::invalid_argument("spatial dimension must be 1, 2 or 3");
  const double nu = nu_s();
  if (!(nu > 0.0))
    throw ModelError("existence condition beta + (2 gamma - 1) alpha - d/2 > 0 violated (nu_s = " +
                         std::to_string(nu) + ")",
                     nu);
}

RangeParams to_range(const SpdeParams& sp) {
  sp.validate();
  const double half_d = 0.5 * sp.d;
  const double spatial = (2.0 * sp.gamma - 1.0) * sp.alpha;
  RangeParams rp;
  rp.nu_s = sp.nu_s();
  rp.nu_t = sp.gamma - 0.5 + std::min(sp.beta - half_d, 0.0) / (2.0 * sp.alpha);
  rp.beta_s = spatial / (sp.beta + spatial);
  rp.r_s = std::sqrt(8.0 * rp.nu_s) / sp.kappa;
  rp.r_t = sp.r * std::pow(sp.kappa, -2.0 * sp.alpha) * std::sqrt(8.0 * (sp.gamma - 0.5));
  rp.sigma = sp.sigma;
  return rp;
}

SpdeParams to_spde(const RangeParams& rp, int d) {
  check_positive(rp.nu_s, "nu_s");
  check_positive(rp.nu_t, "nu_t");
  check_positive(rp.r_s, "r_s");
  check_positive(rp.r_t, "r_t");
  if (!(rp.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  if (!(rp.beta_s >= 0.0 && rp.beta_s <= 1.0)) throw std::invalid_argument("beta_s must lie in [0, 1]");
  if (rp.beta_s == 0.0) throw std::invalid_argument("beta_s = 0 is the separable limit: it forces alpha = 0");
  if (rp.beta_s == 1.0) throw std::invalid_argument("beta_s = 1 is the fully non-separable limit: it forces beta = 0");
  if (d < 1 || d > 3) throw std::invalid_argument("spatial dimension must be 1, 2 or 3");

  const double beta_star = rp.nu_s / (rp.nu_s + 0.5 * d);
  const double ratio = rp.beta_s / beta_star;
  SpdeParams sp;
  sp.d = d;
  sp.gamma = rp.nu_t * std::max(1.0, ratio) + 0.5;
  sp.alpha = rp.nu_s / (2.0 * rp.nu_t) * std::min(1.0, ratio);
  sp.beta = (1.0 - rp.beta_s) / beta_star * rp.nu_s;
  sp.kappa = std::sqrt(8.0 * rp.nu_s) / rp.r_s;
  sp.r = rp.r_t * std::pow(sp.kappa, 2.0 * sp.alpha) / std::sqrt(8.0 * (sp.gamma - 0.5));
  sp.sigma = rp.sigma;
  return sp;
}

ModeSpectrum mu_lambda(const SpdeParams& params, const EigenBasis& basis) {
  params.validate();
  if (spatial_dimension(basis.domain()) != params.d)
    throw std::invalid_argument("basis dimension does not match the model dimension");
  ModeSpectrum out;
  out.mu.resize(basis.size());
  out.lambda.resize(basis.size());
  const double k2 = params.kappa * params.kappa;
  const double scale = params.sigma * params.sigma * std::pow(params.r, -2.0 * params.gamma);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double shifted = k2 + basis.eigenvalue(k);
    out.mu[k] = std::pow(shifted, params.alpha) / params.r;
    out.lambda[k] = scale * std::pow(shifted, -params.beta);
  }
  return out;
}

TheoryRates theory_rates(const SpdeParams& sp, int m) {
  sp.validate();
  if (m < 0) throw std::invalid_argument("theory_rates: order must be non-negative");
  const double d = sp.d;
  const double g = sp.gamma;
  TheoryRates t;
  t.r_mu = 2.0 * sp.alpha / d;
  t.r_lambda = -2.0 * sp.beta / d;
  t.nu = -(d / 2.0) * (1.0 + t.r_lambda - (2.0 * g - 1.0) * t.r_mu);
  t.spatial_mse_order = 2.0 * t.nu / d;
  t.temporal_mse_order = std::min(2.0 * g - 1.0, 2.0 * m + 2.0);
  t.b = t.temporal_mse_order;
  if (g <= m + 1.5)
    t.delta = 1.0 + t.r_lambda;
  else if (g <= m + 2.0)
    t.delta = 1.0 + t.r_lambda - (2.0 * g - 2.0 * m - 3.0) * t.r_mu;
  else
    t.delta = 1.0 + t.r_lambda - t.r_mu;
  const double correction = std::min(0.0, t.delta / t.b);
  if (g <= m + 2.0)
    t.zeta = t.r_mu - correction;
  else
    t.zeta = (2.0 * g - 2.0) / (2.0 * m + 2.0) * t.r_mu - correction;
  t.cost_exponent = d / (2.0 * t.nu) * (1.0 + t.zeta);
  t.log_factor = std::abs(g - (m + 1.5)) < 1e-12;
  return t;
}

}  // namespace fracspde
