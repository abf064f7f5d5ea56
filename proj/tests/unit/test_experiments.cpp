#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracspde/experiments.hpp"

using namespace fracspde;
using doctest::Approx;

TEST_CASE("slope of an exact power law") {
  const std::vector<double> h{0.1, 0.01, 0.001};
  const std::vector<double> e{3.0 * std::pow(0.1, 1.5), 3.0 * std::pow(0.01, 1.5), 3.0 * std::pow(0.001, 1.5)};
  const auto fit = fit_slope(h, e);
  CHECK(fit.slope == Approx(1.5).epsilon(1e-12));
  CHECK(fit.intercept == Approx(std::log10(3.0)).epsilon(1e-12));
  CHECK(fit.stderr_slope == Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("slope fit with scatter") {
  // log10 e = 1 + 2 log10 h + noise
  const std::vector<double> h{1, 10, 100, 1000};
  const std::vector<double> e{std::pow(10.0, 1.1), std::pow(10.0, 2.9), std::pow(10.0, 5.1), std::pow(10.0, 6.9)};
  const auto fit = fit_slope(h, e);
  CHECK(fit.slope == Approx(1.96));
  CHECK(fit.stderr_slope > 0.0);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(fit_slope(one, one), std::invalid_argument);
  const std::vector<double> zero{1.0, 0.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(fit_slope(two, zero), std::invalid_argument);
}

TEST_CASE("dyadic levels") {
  CHECK(dyadic_level(1.0, 0x1p-7) == 7);
  CHECK(dyadic_level(10.0, 10.0 / 16) == 4);
  CHECK_THROWS_AS(dyadic_level(1.0, 0.3), std::invalid_argument);
}

TEST_CASE("default spectral subset skips the finest row") {
  CHECK(default_spectral_subset(10) == std::vector<std::size_t>{5, 6, 7, 8});
  CHECK(default_spectral_subset(5) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS(default_spectral_subset(4));
}

TEST_CASE("refit restricts the regression") {
  ConvergenceTable t;
  t.kind = "spectral";
  for (int L = 1; L <= 5; ++L) t.rows.push_back({L, std::ldexp(1.0, L), std::ldexp(1.0, -L), 0.0});
  refit(t, {1, 2, 3});
  CHECK(t.order == Approx(1.0));
  CHECK(t.subset.size() == 3);
  CHECK_THROWS(refit(t, {7}));
}

TEST_CASE("temporal harness is deterministic and thread independent") {
  TemporalConfig cfg;
  cfg.gamma = 1.8;
  cfg.mu = 0.5;
  cfg.reference_h = 0x1p-9;
  cfg.ladder_h = {0x1p-4, 0x1p-5, 0x1p-6};
  cfg.replicas = 8;
  cfg.seed = 12;
  const auto a = temporal_convergence(cfg);
  cfg.threads = 4;
  const auto b = temporal_convergence(cfg);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.rows[i].rel_rmse == b.rows[i].rel_rmse);
  CHECK(a.rows[0].level == 4);
  CHECK(a.rows[0].rel_rmse > a.rows[2].rel_rmse);
  CHECK(a.theory_order == Approx(1.0));
  CHECK(a.kind == "temporal");
}

TEST_CASE("temporal ladder must be coarser than the reference") {
  TemporalConfig cfg;
  cfg.reference_h = 0x1p-8;
  cfg.ladder_h = {0x1p-9};
  cfg.replicas = 4;
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
  cfg.ladder_h = {0x1p-4, 0x1p-4};
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
  cfg.ladder_h = {0.3};
  CHECK_THROWS_AS(temporal_convergence(cfg), std::invalid_argument);
}

TEST_CASE("spectral harness on a small ladder") {
  SpectralConfig cfg;
  cfg.reference_modes = 256;
  cfg.ladder = {2, 4, 8, 16, 32, 64};
  cfg.h = 0x1p-5;
  cfg.horizon = 1.0;
  cfg.seed = 4;
  const auto t = spectral_convergence(cfg);
  REQUIRE(t.rows.size() == 6);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].rel_rmse <= t.rows[i - 1].rel_rmse);
  CHECK(t.subset == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(t.theory_order == Approx(0.5));
  CHECK(t.order > 0.0);
  cfg.ladder = {3};
  CHECK_THROWS(spectral_convergence(cfg));
}

TEST_CASE("lat-lon grid is cell centred and latitude major") {
  const auto g = latlon_grid(2, 4);
  REQUIRE(g.size() == 16);
  CHECK(g[0] == Approx(3.0 * std::numbers::pi / 4.0));  // southern row first
  CHECK(g[1] == Approx(std::numbers::pi / 4.0 - std::numbers::pi));
  CHECK(g[8] == Approx(std::numbers::pi / 4.0));
}

TEST_CASE("sphere experiment shapes") {
  SphereConfig cfg;
  cfg.modes = 16;
  cfg.T = 1.0;
  cfg.h = 0.25;
  cfg.snapshot_times = {0.5, 1.0};
  cfg.n_lat = 3;
  cfg.n_lon = 6;
  cfg.equator_time = 1.0;
  cfg.equator_points = 12;
  const auto res = sphere_experiment(cfg);
  REQUIRE(res.snapshots.size() == 2);
  CHECK(res.snapshots[0].size() == 18);
  CHECK(res.trace_times.size() == 5);
  CHECK(res.trace_values.size() == 5);
  CHECK(res.equator.size() == 12);
  CHECK(res.trace_values[0] == 0.0);
}
