#include "fracspde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracspde/noise.hpp"
#include "fracspde/parallel.hpp"
#include "fracspde/rng.hpp"

namespace fracspde {

namespace {

std::size_t step_count(double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw std::invalid_argument("horizon and step must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(T / h));
  if (steps == 0 || std::abs(static_cast<double>(steps) * h - T) > 1e-9 * T)
    throw std::invalid_argument("horizon must be a whole number of steps");
  return steps;
}

}  // namespace

SlopeFit fit_slope(std::span<const double> resolution, std::span<const double> error) {
  const std::size_t n = resolution.size();
  if (n < 2) throw std::invalid_argument("fit_slope: need at least 2 points");
  if (error.size() != n) throw std::invalid_argument("fit_slope: size mismatch");
  std::vector<double> x(n), y(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(resolution[i] > 0.0) || !(error[i] > 0.0))
      throw std::invalid_argument("fit_slope: resolutions and errors must be positive");
    x[i] = std::log10(resolution[i]);
    y[i] = std::log10(error[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_slope: resolutions must not all coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.stderr_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

void refit(ConvergenceTable& table, std::vector<std::size_t> subset) {
  std::vector<double> res, err;
  for (std::size_t i : subset) {
    if (i >= table.rows.size()) throw std::invalid_argument("refit: subset index out of range");
    res.push_back(table.rows[i].resolution);
    err.push_back(table.rows[i].rel_rmse);
  }
  table.fit = fit_slope(res, err);
  table.subset = std::move(subset);
  table.order = table.kind == "spectral" ? -table.fit.slope : table.fit.slope;
}

int dyadic_level(double T, double h) {
  if (!(h > 0.0) || !(T > 0.0)) throw std::invalid_argument("resolution must be positive");
  const double ratio = T / h;
  const double level = std::round(std::log2(ratio));
  if (level < 0.0 || level > 40.0 || std::abs(ratio - std::ldexp(1.0, static_cast<int>(level))) > 1e-9 * ratio)
    throw std::invalid_argument("resolution " + std::to_string(h) + " is not T / 2^L");
  return static_cast<int>(level);
}

ConvergenceTable temporal_convergence(const TemporalConfig& cfg) {
  if (cfg.replicas < 2) throw std::invalid_argument("temporal_convergence: need at least 2 replicas");
  if (cfg.ladder_h.empty()) throw std::invalid_argument("temporal_convergence: empty ladder");
  const int ref_level = dyadic_level(cfg.T, cfg.reference_h);
  std::vector<int> levels;
  for (double h : cfg.ladder_h) {
    const int L = dyadic_level(cfg.T, h);
    if (L >= ref_level) throw std::invalid_argument("temporal_convergence: ladder must be coarser than the reference");
    levels.push_back(L);
  }
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] == levels[i - 1]) throw std::invalid_argument("temporal_convergence: repeated ladder level");

  const int m = scheme_order(cfg.scheme);
  const ModeSpectrum spectrum{{cfg.mu}, {cfg.lambda}};
  const std::vector<double> out{cfg.T};
  const TemporalMesh ref_mesh = TemporalMesh::uniform(cfg.T, std::size_t{1} << ref_level);
  const NoiseSampler sampler(ref_mesh, spectrum.mu, m);

  // One simulator per level from the reference down to the coarsest.
  const int coarsest = *std::min_element(levels.begin(), levels.end());
  std::vector<PathSimulator> sims;
  for (int L = ref_level; L >= coarsest; --L)
    sims.emplace_back(cfg.gamma, spectrum, TemporalMesh::uniform(cfg.T, std::size_t{1} << L), cfg.scheme, out);

  const std::size_t R = cfg.replicas;
  std::vector<double> ref(R);
  std::vector<std::vector<double>> approx(levels.size(), std::vector<double>(R));
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    NoiseBlock block = sampler.sample(rng::derive_seed(cfg.seed, r));
    double value = 0.0;
    sims[0].evaluate(block, {&value, 1});
    ref[r] = value;
    for (int L = ref_level - 1; L >= coarsest; --L) {
      block = restrict_noise(block);
      const auto it = std::find(levels.begin(), levels.end(), L);
      if (it == levels.end()) continue;
      sims[static_cast<std::size_t>(ref_level - L)].evaluate(block, {&value, 1});
      approx[static_cast<std::size_t>(it - levels.begin())][r] = value;
    }
  });

  ConvergenceTable table;
  table.kind = "temporal";
  table.replicas = R;
  table.parameters = {{"gamma", cfg.gamma}, {"mu", cfg.mu},        {"lambda", cfg.lambda},
                      {"T", cfg.T},         {"m", static_cast<double>(m)}, {"reference_h", cfg.reference_h}};
  if (const auto* lp = std::get_if<LeftPoint>(&cfg.scheme)) table.parameters.emplace_back("theta", lp->theta);
  std::vector<std::size_t> order(levels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return levels[a] < levels[b]; });
  for (std::size_t i : order) {
    const auto e = relative_rmse(ref, approx[i]);
    table.rows.push_back({levels[i], std::ldexp(cfg.T, -levels[i]), e.value, e.stderr_jackknife});
  }
  std::vector<std::size_t> all(table.rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  refit(table, all);
  table.theory_order = std::min(cfg.gamma - 0.5, m + 1.0);
  return table;
}

std::vector<std::size_t> default_spectral_subset(std::size_t rows) {
  if (rows < 5) throw std::invalid_argument("spectral subset: need at least 5 ladder points");
  return {rows - 5, rows - 4, rows - 3, rows - 2};
}

ConvergenceTable spectral_convergence(const SpectralConfig& cfg) {
  if (cfg.ladder.empty()) throw std::invalid_argument("spectral_convergence: empty ladder");
  if (cfg.replicas < 1) throw std::invalid_argument("spectral_convergence: need at least 1 replica");
  const std::size_t Mref = cfg.reference_modes;
  if (Mref == 0 || (Mref & (Mref - 1)) != 0)
    throw std::invalid_argument("spectral_convergence: reference mode count must be a power of 2");
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    const std::size_t M = cfg.ladder[i];
    if (M == 0 || (M & (M - 1)) != 0) throw std::invalid_argument("spectral_convergence: ladder must be powers of 2");
    if (M > Mref) throw std::invalid_argument("spectral_convergence: ladder exceeds the reference");
    if (i > 0 && M <= cfg.ladder[i - 1]) throw std::invalid_argument("spectral_convergence: ladder must increase");
  }
  if (!(cfg.eval_time > 0.0) || cfg.eval_time > cfg.horizon)
    throw std::invalid_argument("spectral_convergence: evaluation time outside the horizon");

  const SpdeParams sp = to_spde(cfg.range, cfg.d);
  const EigenBasis basis = eigen_rectangle(cfg.d, Mref);
  const ModeSpectrum spectrum = mu_lambda(sp, basis);
  const TemporalMesh mesh = TemporalMesh::uniform(cfg.horizon, step_count(cfg.horizon, cfg.h));
  const PathSimulator sim(sp.gamma, spectrum, mesh, Projection{cfg.m}, {cfg.eval_time});
  // Only intervals up to the evaluation node influence c~_k(eval_time); the
  // keyed streams make this identical to sampling the whole horizon.
  const NoiseSampler sampler(mesh, spectrum.mu, cfg.m, sim.required_intervals());

  const std::size_t R = cfg.replicas;
  std::vector<std::vector<double>> tail(cfg.ladder.size(), std::vector<double>(R));
  std::vector<double> total(R);
  std::vector<double> coeffs(Mref);
  for (std::size_t r = 0; r < R; ++r) {
    const std::uint64_t seed = R == 1 ? cfg.seed : rng::derive_seed(cfg.seed, r);
    const NoiseBlock block = sampler.sample(seed, cfg.threads);
    sim.evaluate(block, coeffs, cfg.threads);
    // Suffix sums from the smallest coefficients upwards.
    std::vector<double> suffix(Mref + 1, 0.0);
    for (std::size_t k = Mref; k-- > 0;) suffix[k] = suffix[k + 1] + coeffs[k] * coeffs[k];
    total[r] = suffix[0];
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) tail[i][r] = suffix[cfg.ladder[i]];
  }

  ConvergenceTable table;
  table.kind = "spectral";
  table.replicas = R;
  table.parameters = {{"nu_s", cfg.range.nu_s},       {"nu_t", cfg.range.nu_t},
                      {"r_s", cfg.range.r_s},         {"r_t", cfg.range.r_t},
                      {"beta_s", cfg.range.beta_s},   {"sigma", cfg.range.sigma},
                      {"h", cfg.h},                   {"horizon", cfg.horizon},
                      {"eval_time", cfg.eval_time},   {"reference_modes", static_cast<double>(Mref)}};
  double total_sum = 0.0;
  for (double v : total) total_sum += v;
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    double tail_sum = 0.0;
    for (double v : tail[i]) tail_sum += v;
    LadderRow row;
    row.level = static_cast<int>(std::log2(static_cast<double>(cfg.ladder[i])) + 0.5);
    row.resolution = static_cast<double>(cfg.ladder[i]);
    row.rel_rmse = std::sqrt(tail_sum / total_sum);
    if (R >= 2) {
      // Jackknife over replicas of sqrt(sum tail / sum total).
      std::vector<double> loo(R);
      double mean = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        loo[r] = std::sqrt((tail_sum - tail[i][r]) / (total_sum - total[r]));
        mean += loo[r];
      }
      mean /= static_cast<double>(R);
      double ss = 0.0;
      for (double v : loo) ss += (v - mean) * (v - mean);
      row.mc_stderr = std::sqrt(ss * static_cast<double>(R - 1) / static_cast<double>(R));
    }
    table.rows.push_back(row);
  }
  std::vector<std::size_t> subset = cfg.subset.empty() ? default_spectral_subset(table.rows.size()) : cfg.subset;
  // A zero tail (M equal to the reference) cannot enter a log-log fit.
  for (std::size_t i : subset)
    if (i >= table.rows.size() || !(table.rows[i].rel_rmse > 0.0))
      throw std::invalid_argument("spectral_convergence: subset row has zero error or is out of range");
  refit(table, std::move(subset));
  table.theory_order = theory_rates(sp, cfg.m).spatial_mse_order / 2.0;
  return table;
}

std::vector<double> latlon_grid(std::size_t n_lat, std::size_t n_lon) {
  if (n_lat == 0 || n_lon == 0) throw std::invalid_argument("latlon_grid: empty grid");
  constexpr double pi = std::numbers::pi;
  std::vector<double> pts;
  pts.reserve(2 * n_lat * n_lon);
  for (std::size_t i = 0; i < n_lat; ++i) {
    const double lat = -pi / 2 + pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n_lat);
    for (std::size_t j = 0; j < n_lon; ++j) {
      const double lon = -pi + 2 * pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n_lon);
      pts.push_back(pi / 2 - lat);
      pts.push_back(lon);
    }
  }
  return pts;
}

SphereResult sphere_experiment(const SphereConfig& cfg) {
  constexpr double pi = std::numbers::pi;
  const SpdeParams& sp = cfg.params;
  if (sp.d != 2) throw std::invalid_argument("sphere_experiment: the sphere is two-dimensional");
  const std::size_t steps = step_count(cfg.T, cfg.h);
  if (cfg.equator_points == 0) throw std::invalid_argument("sphere_experiment: equator trace needs points");

  const EigenBasis basis = eigen_sphere(cfg.modes);
  const ModeSpectrum spectrum = mu_lambda(sp, basis);
  const TemporalMesh mesh = TemporalMesh::uniform(cfg.T, steps);
  std::vector<double> times(mesh.nodes().begin(), mesh.nodes().end());
  const PathSimulator sim(sp.gamma, spectrum, mesh, Projection{cfg.m}, times);
  const NoiseBlock block = sample_block(mesh, spectrum.mu, cfg.m, cfg.seed, 0, cfg.threads);
  std::vector<double> values(sim.modes() * sim.outputs());
  sim.evaluate(block, values, cfg.threads);

  const std::size_t J = sim.outputs();
  auto coeffs_at = [&](std::size_t n) {
    std::vector<double> c(sim.modes());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = values[k * J + n];
    return c;
  };

  SphereResult result;
  const std::vector<double> grid = latlon_grid(cfg.n_lat, cfg.n_lon);
  for (double t : cfg.snapshot_times) {
    const std::size_t n = mesh.index_of(t, 1e-9);
    result.snapshots.push_back(assemble_field(coeffs_at(n), mesh.node(n), basis, grid));
  }

  const double point[2] = {pi / 2 - cfg.trace_lat_deg * pi / 180.0, cfg.trace_lon_deg * pi / 180.0};
  std::vector<double> e(basis.size());
  basis.evaluate_all(point, e);
  result.trace_times = times;
  result.trace_values.resize(J);
  for (std::size_t n = 0; n < J; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) acc += values[k * J + n] * e[k];
    result.trace_values[n] = acc;
  }

  std::vector<double> equator;
  equator.reserve(2 * cfg.equator_points);
  for (std::size_t j = 0; j < cfg.equator_points; ++j) {
    equator.push_back(pi / 2);
    equator.push_back(-pi + 2 * pi * static_cast<double>(j) / static_cast<double>(cfg.equator_points));
  }
  const std::size_t ne = mesh.index_of(cfg.equator_time, 1e-9);
  result.equator = assemble_field(coeffs_at(ne), mesh.node(ne), basis, equator);
  return result;
}

}  // namespace fracspde
