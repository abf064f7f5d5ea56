#include "fracspde/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fracspde/parallel.hpp"

namespace fracspde {

namespace {

// e^{-x} with x > 700 is below 1e-300 and contributes nothing.
constexpr double kUnderflowExponent = 700.0;

}  // namespace

std::string describe(const Scheme& scheme) {
  char buf[64];
  if (const auto* lp = std::get_if<LeftPoint>(&scheme))
    std::snprintf(buf, sizeof buf, "leftpoint(theta=%g)", lp->theta);
  else
    std::snprintf(buf, sizeof buf, "projection(m=%d)", std::get<Projection>(scheme).m);
  return buf;
}

std::string mesh_id(const TemporalMesh& mesh) {
  char buf[96];
  if (mesh.is_uniform(1e-9))
    std::snprintf(buf, sizeof buf, "uniform(T=%.17g,N=%zu)", mesh.end_time(), mesh.intervals());
  else
    std::snprintf(buf, sizeof buf, "nodes(T=%.17g,N=%zu,ratio=%.6g)", mesh.end_time(), mesh.intervals(),
                  mesh.ratio());
  return buf;
}

PathSimulator::PathSimulator(double gamma, ModeSpectrum spectrum, TemporalMesh mesh, Scheme scheme,
                             std::vector<double> output_times, std::size_t cache_limit)
    : gamma_(gamma),
      spectrum_(std::move(spectrum)),
      mesh_(std::move(mesh)),
      scheme_(std::move(scheme)),
      order_(scheme_order(scheme_)),
      out_times_(std::move(output_times)) {
  if (!(gamma_ > 0.5)) throw std::invalid_argument("simulator: gamma must exceed 1/2");
  if (spectrum_.mu.empty() || spectrum_.mu.size() != spectrum_.lambda.size())
    throw std::invalid_argument("simulator: spectrum must list matching mu and lambda");
  for (std::size_t k = 0; k < spectrum_.mu.size(); ++k)
    if (!(spectrum_.mu[k] > 0.0) || !(spectrum_.lambda[k] >= 0.0))
      throw std::invalid_argument("simulator: need mu_k > 0 and lambda_k >= 0");
  if (out_times_.empty()) throw std::invalid_argument("simulator: no output times");

  const std::size_t dim = static_cast<std::size_t>(order_) + 1;
  out_nodes_.reserve(out_times_.size());
  for (double t : out_times_) {
    const std::size_t n = mesh_.index_of(t, 1e-9);
    out_nodes_.push_back(n);
    required_ = std::max(required_, n);
  }

  poly_.resize(out_nodes_.size());
  for (std::size_t i = 0; i < out_nodes_.size(); ++i) {
    const std::size_t n = out_nodes_[i];
    if (n == 0) continue;
    const PiecewisePoly p = build_quadrature_poly(gamma_, mesh_, n, scheme_);
    auto& a = poly_[i];
    a.resize(n * dim);
    for (std::size_t ell = 1; ell <= n; ++ell) {
      const auto b = p.coeffs(ell);
      double tj = 1.0;
      for (std::size_t j = 0; j < dim; ++j) {
        a[(ell - 1) * dim + j] = b[j] * tj;
        tj *= mesh_.node(ell);
      }
    }
  }

  const double inv_gamma = 1.0 / std::tgamma(gamma_);
  scale_.resize(modes());
  for (std::size_t k = 0; k < modes(); ++k) scale_[k] = std::sqrt(spectrum_.lambda[k]) * inv_gamma;

  const std::size_t J = outputs();
  first_.resize(modes() * J);
  std::size_t total = 0;
  for (std::size_t k = 0; k < modes(); ++k) {
    const double mu = spectrum_.mu[k];
    for (std::size_t i = 0; i < J; ++i) {
      const std::size_t n = out_nodes_[i];
      const double tn = mesh_.node(n);
      std::size_t lo = 1, hi = n + 1;  // first ell in [1, n] with mu (t_n - t_ell) <= 700
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (mu * (tn - mesh_.node(mid)) > kUnderflowExponent)
          lo = mid + 1;
        else
          hi = mid;
      }
      const std::size_t ell = lo;
      first_[k * J + i] = ell;
      total += (n + 1 - ell) * dim;
    }
  }

  if (total <= cache_limit) {
    weights_.resize(total);
    weight_offset_.resize(modes() * J);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < modes(); ++k) {
      const double mu = spectrum_.mu[k];
      for (std::size_t i = 0; i < J; ++i) {
        weight_offset_[k * J + i] = pos;
        const std::size_t n = out_nodes_[i];
        const double tn = mesh_.node(n);
        for (std::size_t ell = first_[k * J + i]; ell <= n; ++ell) {
          const double d = scale_[k] * std::exp(-mu * (tn - mesh_.node(ell)));
          const double* a = poly_[i].data() + (ell - 1) * dim;
          for (std::size_t j = 0; j < dim; ++j) weights_[pos++] = d * a[j];
        }
      }
    }
  }
}

void PathSimulator::check_noise(const NoiseBlock& noise) const {
  if (noise.order() != order_)
    throw std::invalid_argument("simulator: noise order " + std::to_string(noise.order()) +
                                " does not match scheme order " + std::to_string(order_));
  if (noise.intervals() < required_)
    throw std::invalid_argument("simulator: noise covers " + std::to_string(noise.intervals()) +
                                " intervals but outputs need " + std::to_string(required_));
  if (noise.mode_count() < modes()) throw std::invalid_argument("simulator: noise has fewer modes than the spectrum");
  const TemporalMesh& nm = noise.mesh();
  if (nm.intervals() != mesh_.intervals()) throw std::invalid_argument("simulator: noise mesh does not match");
  const double tol = 1e-12 * mesh_.end_time();
  for (std::size_t i = 0; i <= required_; ++i)
    if (std::abs(nm.node(i) - mesh_.node(i)) > tol) throw std::invalid_argument("simulator: noise mesh does not match");
  for (std::size_t k = 0; k < modes(); ++k)
    if (std::abs(noise.modes()[k] - spectrum_.mu[k]) > 1e-12 * spectrum_.mu[k])
      throw std::invalid_argument("simulator: noise mode " + std::to_string(k + 1) + " has a different mu");
}

std::uint64_t PathSimulator::evaluate_mode(const NoiseBlock& noise, std::size_t k, double* out) const {
  const std::size_t dim = static_cast<std::size_t>(order_) + 1;
  const std::size_t J = outputs();
  const double mu = spectrum_.mu[k];
  std::uint64_t terms = 0;
  for (std::size_t i = 0; i < J; ++i) {
    const std::size_t n = out_nodes_[i];
    const std::size_t first = first_[k * J + i];
    double acc = 0.0;
    if (cached()) {
      const double* wt = weights_.data() + weight_offset_[k * J + i];
      for (std::size_t ell = first; ell <= n; ++ell) {
        const auto w = noise.increments(ell, k);
        for (std::size_t j = 0; j < dim; ++j) acc += *wt++ * w[j];
      }
    } else {
      const double tn = mesh_.node(n);
      for (std::size_t ell = first; ell <= n; ++ell) {
        const double d = scale_[k] * std::exp(-mu * (tn - mesh_.node(ell)));
        const double* a = poly_[i].data() + (ell - 1) * dim;
        const auto w = noise.increments(ell, k);
        for (std::size_t j = 0; j < dim; ++j) acc += (d * a[j]) * w[j];
      }
    }
    out[i] = acc;
    terms += n + 1 - first;
  }
  return terms;
}

void PathSimulator::evaluate(const NoiseBlock& noise, std::span<double> out, int threads,
                             SimulationStats* stats) const {
  check_noise(noise);
  if (out.size() != modes() * outputs()) throw std::invalid_argument("simulator: output buffer has the wrong size");
  std::vector<std::uint64_t> terms(modes(), 0);
  parallel_for(modes(), threads,
               [&](std::size_t k) { terms[k] = evaluate_mode(noise, k, out.data() + k * outputs()); });
  if (stats)
    for (auto t : terms) stats->terms += t;
}

std::vector<CoefficientPath> PathSimulator::run(const NoiseBlock& noise, int threads, SimulationStats* stats) const {
  std::vector<double> values(modes() * outputs());
  evaluate(noise, values, threads, stats);
  std::vector<CoefficientPath> paths(modes());
  const std::string scheme = describe(scheme_);
  const std::string id = mesh_id(mesh_);
  for (std::size_t k = 0; k < modes(); ++k) {
    auto& p = paths[k];
    p.k = k;
    p.times = out_times_;
    p.values.assign(values.begin() + static_cast<long>(k * outputs()),
                    values.begin() + static_cast<long>((k + 1) * outputs()));
    p.scheme = scheme;
    p.seed = noise.seed();
    p.mesh_id = id;
  }
  return paths;
}

std::vector<CoefficientPath> simulate_paths(double gamma, const ModeSpectrum& spectrum, const TemporalMesh& mesh,
                                            const Scheme& scheme, std::span<const double> output_times,
                                            const NoiseBlock& noise, int threads, SimulationStats* stats) {
  PathSimulator sim(gamma, spectrum, mesh, scheme, std::vector<double>(output_times.begin(), output_times.end()));
  return sim.run(noise, threads, stats);
}

std::vector<CoefficientPath> simulate_paths(const SpdeParams& params, const EigenBasis& basis,
                                            const TemporalMesh& mesh, const Scheme& scheme,
                                            std::span<const double> output_times, const NoiseBlock& noise,
                                            int threads, SimulationStats* stats) {
  return simulate_paths(params.gamma, mu_lambda(params, basis), mesh, scheme, output_times, noise, threads, stats);
}

FieldSnapshot assemble_field(std::span<const double> coeffs, double time, const EigenBasis& basis,
                             std::span<const double> points) {
  const int pd = basis.point_dim();
  if (points.size() % static_cast<std::size_t>(pd) != 0)
    throw std::invalid_argument("assemble_field: point coordinates not a multiple of the point dimension");
  if (coeffs.size() > basis.size()) throw std::invalid_argument("assemble_field: more coefficients than basis functions");
  FieldSnapshot snap;
  snap.time = time;
  snap.point_dim = pd;
  snap.points.assign(points.begin(), points.end());
  snap.modes = coeffs.size();
  const std::size_t count = points.size() / static_cast<std::size_t>(pd);
  snap.values.resize(count);
  std::vector<double> e(coeffs.size());
  for (std::size_t p = 0; p < count; ++p) {
    basis.evaluate_all(points.subspan(p * pd, static_cast<std::size_t>(pd)), e);
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * e[k];
    snap.values[p] = acc;
  }
  return snap;
}

FieldSnapshot assemble_field(std::span<const CoefficientPath> paths, std::size_t index, const EigenBasis& basis,
                             std::span<const double> points) {
  if (paths.empty()) throw std::invalid_argument("assemble_field: no paths");
  const double t = paths[0].times.at(index);
  std::vector<double> coeffs(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    if (paths[k].times.at(index) != t) throw std::invalid_argument("assemble_field: paths do not share the output time");
    coeffs[k] = paths[k].values.at(index);
  }
  return assemble_field(coeffs, t, basis, points);
}

RelativeError relative_rmse(std::span<const double> reference, std::span<const double> approx) {
  const std::size_t R = reference.size();
  if (R < 2) throw std::invalid_argument("relative_rmse: need at least 2 replicas");
  if (approx.size() != R) throw std::invalid_argument("relative_rmse: replica counts differ");
  double num = 0.0;
  double den = 0.0;
  std::vector<double> d2(R), r2(R);
  for (std::size_t i = 0; i < R; ++i) {
    const double d = reference[i] - approx[i];
    d2[i] = d * d;
    r2[i] = reference[i] * reference[i];
    num += d2[i];
    den += r2[i];
  }
  if (!(den > 0.0)) throw std::domain_error("relative_rmse: reference has zero second moment");
  RelativeError out;
  out.value = std::sqrt(num / den);
  std::vector<double> loo(R);
  double mean = 0.0;
  for (std::size_t i = 0; i < R; ++i) {
    const double dd = den - r2[i];
    loo[i] = dd > 0.0 ? std::sqrt((num - d2[i]) / dd) : 0.0;
    mean += loo[i];
  }
  mean /= static_cast<double>(R);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.stderr_jackknife = std::sqrt(ss * static_cast<double>(R - 1) / static_cast<double>(R));
  return out;
}

}  // namespace fracspde
