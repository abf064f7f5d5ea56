#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracspde/noise.hpp"
#include "fracspde/oracle.hpp"
#include "fracspde/quadrature.hpp"
#include "fracspde/simulator.hpp"

using namespace fracspde;
using doctest::Approx;

namespace {

ModeSpectrum spectrum(std::size_t M) {
  ModeSpectrum s;
  for (std::size_t k = 0; k < M; ++k) {
    s.mu.push_back(0.2 + 0.9 * k);
    s.lambda.push_back(1.0 / (1.0 + k));
  }
  return s;
}

NoiseBlock zero_block(const TemporalMesh& mesh, const std::vector<double>& mu, int m) {
  return NoiseBlock(mesh, mu, m, mesh.intervals(), 0, "manual");
}

}  // namespace

TEST_CASE("paths are linear in the noise") {
  const auto mesh = TemporalMesh::uniform(1.0, 32);
  const auto spec = spectrum(4);
  const std::vector<double> times{0.25, 1.0};
  const PathSimulator sim(0.8, spec, mesh, Projection{1}, times);
  const auto a = sample_block(mesh, spec.mu, 1, 1);
  const auto b = sample_block(mesh, spec.mu, 1, 2);
  auto c = zero_block(mesh, spec.mu, 1);
  for (std::size_t i = 0; i < c.raw().size(); ++i) c.raw()[i] = 2.0 * a.raw()[i] - 0.5 * b.raw()[i];
  std::vector<double> ya(8), yb(8), yc(8);
  sim.evaluate(a, ya);
  sim.evaluate(b, yb);
  sim.evaluate(c, yc);
  for (std::size_t i = 0; i < 8; ++i) CHECK(yc[i] == Approx(2.0 * ya[i] - 0.5 * yb[i]).epsilon(1e-12));
}

TEST_CASE("cached and uncached evaluation give identical bits") {
  const auto mesh = TemporalMesh::uniform(2.0, 64);
  const auto spec = spectrum(9);
  const std::vector<double> times{0.5, 1.0, 2.0};
  for (const Scheme& scheme : {Scheme{LeftPoint{0.0}}, Scheme{Projection{2}}}) {
    const PathSimulator cached(1.3, spec, mesh, scheme, times);
    const PathSimulator plain(1.3, spec, mesh, scheme, times, 0);
    CHECK(cached.cached());
    CHECK_FALSE(plain.cached());
    const auto noise = sample_block(mesh, spec.mu, scheme_order(scheme), 17);
    std::vector<double> x(27), y(27), z(27);
    cached.evaluate(noise, x, 1);
    plain.evaluate(noise, y, 1);
    cached.evaluate(noise, z, 5);
    CHECK(x == y);
    CHECK(x == z);
  }
}

TEST_CASE("zero noise amplitude gives zero paths") {
  const auto mesh = TemporalMesh::uniform(1.0, 16);
  ModeSpectrum s = spectrum(3);
  std::fill(s.lambda.begin(), s.lambda.end(), 0.0);
  const std::vector<double> times{0.5, 1.0};
  const auto noise = sample_block(mesh, s.mu, 1, 4);
  for (const auto& p : simulate_paths(1.2, s, mesh, Projection{1}, times, noise))
    for (double v : p.values) CHECK(v == 0.0);
}

TEST_CASE("noise mismatches are rejected") {
  const auto mesh = TemporalMesh::uniform(1.0, 16);
  const auto spec = spectrum(3);
  const std::vector<double> times{1.0};
  const PathSimulator sim(1.2, spec, mesh, Projection{1}, times);
  std::vector<double> out(3);
  CHECK_THROWS_AS(sim.evaluate(sample_block(mesh, spec.mu, 0, 1), out), std::invalid_argument);
  CHECK_THROWS_AS(sim.evaluate(sample_block(TemporalMesh::uniform(1.0, 8), spec.mu, 1, 1), out),
                  std::invalid_argument);
  const std::vector<double> two(spec.mu.begin(), spec.mu.begin() + 2);
  CHECK_THROWS_AS(sim.evaluate(sample_block(mesh, two, 1, 1), out), std::invalid_argument);
  const std::vector<double> off{0.3};
  CHECK_THROWS(PathSimulator(1.2, spec, mesh, Projection{1}, off));
}

TEST_CASE("output times before the horizon need only a prefix of the noise") {
  const auto mesh = TemporalMesh::uniform(4.0, 64);
  const auto spec = spectrum(2);
  const std::vector<double> times{1.0};
  const PathSimulator sim(0.9, spec, mesh, Projection{1}, times);
  CHECK(sim.required_intervals() == 16);
  const auto full = sample_block(mesh, spec.mu, 1, 8);
  const auto prefix = sample_block(mesh, spec.mu, 1, 8, 16);
  std::vector<double> a(2), b(2);
  sim.evaluate(full, a);
  sim.evaluate(prefix, b);
  CHECK(a == b);
}

TEST_CASE("discretised variance equals the integral of the squared surrogate") {
  // The simulator is linear in the noise, so its weights can be read off with unit
  // increments; sum_ell g_ell' Sigma_ell g_ell must equal
  // lambda / Gamma^2 int e^{-2 mu (t - s)} p(s)^2 ds for the surrogate p.
  const double gamma = 0.75, mu = 1.3, lambda = 0.6;
  const auto mesh = TemporalMesh::geometric(1.0, 12, 1.15);
  const ModeSpectrum spec{{mu}, {lambda}};
  for (int m = 0; m <= 2; ++m) {
    const Scheme scheme = m == 0 ? Scheme{LeftPoint{0.0}} : Scheme{Projection{m}};
    const PathSimulator sim(gamma, spec, mesh, scheme, std::vector<double>{1.0});
    double var = 0.0;
    for (std::size_t ell = 1; ell <= mesh.intervals(); ++ell) {
      std::vector<double> g(m + 1);
      for (int j = 0; j <= m; ++j) {
        auto unit = zero_block(mesh, spec.mu, m);
        unit.increments(ell, 0)[j] = 1.0;
        std::vector<double> out(1);
        sim.evaluate(unit, out);
        g[j] = out[0];
      }
      const auto cov = sigma_matrix(mu, mesh.node(ell - 1), mesh.node(ell), m);
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) var += g[i] * cov(i, j) * g[j];
    }
    const auto poly = build_quadrature_poly(gamma, mesh, mesh.intervals(), scheme);
    double integral = 0.0;
    for (std::size_t ell = 1; ell <= mesh.intervals(); ++ell)
      integral += quad::gauss_legendre(32, mesh.node(ell - 1), mesh.node(ell)).integrate([&](double s) {
        const double p = poly.evaluate_on(ell, s);
        return std::exp(-2.0 * mu * (1.0 - s)) * p * p;
      });
    integral *= lambda / std::pow(std::tgamma(gamma), 2);
    CHECK(var == Approx(integral).epsilon(1e-12));
  }
}

TEST_CASE("first-order projection variance approaches the exact variance") {
  const double gamma = 1.7, mu = 0.4, lambda = 1.0;
  const double exact = oracle::exact_variance(mu, lambda, gamma, 1.0);
  double previous = 1.0;
  for (std::size_t N : {8u, 32u, 128u}) {
    const auto mesh = TemporalMesh::uniform(1.0, N);
    const auto poly = build_quadrature_poly(gamma, mesh, N, Projection{1});
    double integral = 0.0;
    for (std::size_t ell = 1; ell <= N; ++ell)
      integral += quad::gauss_legendre(32, mesh.node(ell - 1), mesh.node(ell)).integrate([&](double s) {
        const double p = poly.evaluate_on(ell, s);
        return std::exp(-2.0 * mu * (1.0 - s)) * p * p;
      });
    integral *= lambda / std::pow(std::tgamma(gamma), 2);
    const double err = std::abs(integral - exact) / exact;
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("field assembly sums coefficients against the basis") {
  const auto basis = eigen_rectangle(2, 3);
  const std::vector<double> coeffs{1.0, -2.0, 0.5};
  const std::vector<double> pts{0.3, 0.4, 0.9, 0.1};
  const auto snap = assemble_field(coeffs, 0.7, basis, pts);
  CHECK(snap.size() == 2);
  CHECK(snap.time == 0.7);
  for (std::size_t p = 0; p < 2; ++p) {
    const double x[] = {pts[2 * p], pts[2 * p + 1]};
    double expect = 0.0;
    for (std::size_t k = 0; k < 3; ++k) expect += coeffs[k] * basis.evaluate(k, x);
    CHECK(snap.values[p] == Approx(expect).epsilon(1e-14));
  }
  const std::vector<double> bad{0.1, 0.2, 0.3};
  CHECK_THROWS(assemble_field(coeffs, 0.7, basis, bad));
}

TEST_CASE("relative rmse and its jackknife error") {
  const std::vector<double> ref{1.0, -1.0, 2.0, -2.0};
  CHECK(relative_rmse(ref, ref).value == 0.0);
  const std::vector<double> half{0.5, -0.5, 1.0, -1.0};
  CHECK(relative_rmse(ref, half).value == Approx(0.5));
  CHECK(relative_rmse(ref, half).stderr_jackknife == Approx(0.0).scale(1.0));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(relative_rmse(one, one), std::invalid_argument);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK_THROWS_AS(relative_rmse(zeros, zeros), std::domain_error);
}

TEST_CASE("path metadata") {
  const auto mesh = TemporalMesh::uniform(1.0, 8);
  const auto spec = spectrum(2);
  const auto noise = sample_block(mesh, spec.mu, 0, 77);
  const std::vector<double> times{0.5, 1.0};
  SimulationStats stats;
  const auto paths = simulate_paths(1.4, spec, mesh, LeftPoint{0.0}, times, noise, 1, &stats);
  REQUIRE(paths.size() == 2);
  CHECK(paths[1].k == 1);
  CHECK(paths[0].seed == 77);
  CHECK(paths[0].times == times);
  CHECK(paths[0].scheme == describe(LeftPoint{0.0}));
  CHECK(paths[0].mesh_id == mesh_id(mesh));
  CHECK(stats.terms == 2 * (4 + 8));
}
