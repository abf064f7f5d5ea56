#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracspde/kernel.hpp"
#include "fracspde/simulator.hpp"
#include "fracspde/spectral.hpp"

namespace fracspde {

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log10(error) on log10(resolution).
SlopeFit fit_slope(std::span<const double> resolution, std::span<const double> error);

struct LadderRow {
  int level = 0;           // log2 of N (time) or of M (space)
  double resolution = 0;   // h or M
  double rel_rmse = 0;
  double mc_stderr = 0;
};

struct ConvergenceTable {
  std::string kind;  // "temporal" or "spectral"
  std::vector<LadderRow> rows;
  std::size_t replicas = 0;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::size_t> subset;  // rows used in the fit
  SlopeFit fit;
  /// Convergence order: the fitted slope for step sizes, its negation for mode counts.
  double order = 0.0;
  double theory_order = 0.0;
};

/// Refits `table` over the given row indices and updates its order.
void refit(ConvergenceTable& table, std::vector<std::size_t> subset);

/// Level L with T / h == 2^L; throws std::invalid_argument otherwise.
int dyadic_level(double T, double h);

struct TemporalConfig {
  double gamma = 0.8;
  double mu = 0.1;
  double lambda = 1.0;
  double T = 1.0;
  Scheme scheme = LeftPoint{0.0};
  double reference_h = 0x1p-14;
  std::vector<double> ladder_h{0x1p-7, 0x1p-8, 0x1p-9, 0x1p-10};
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Per replica: sample noise on the reference mesh, restrict it down the
/// ladder, and compare every coarse c~(T) with the reference c~(T).
ConvergenceTable temporal_convergence(const TemporalConfig& config);

struct SpectralConfig {
  RangeParams range{1.0, 1.0, 0.1, 5.0, 0.5, 1.0};
  int d = 2;
  std::size_t reference_modes = 4096;
  std::vector<std::size_t> ladder{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  int m = 1;
  double h = 0x1p-7;
  double horizon = 10.0;  // mesh covers [0, horizon]
  double eval_time = 1.0;
  std::size_t replicas = 1;
  std::vector<std::size_t> subset;  // empty: 4 consecutive rows ending one below the finest
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Relative L2(D) error of the M-mode truncation against the reference
/// truncation at eval_time, all sharing one noise realisation.
ConvergenceTable spectral_convergence(const SpectralConfig& config);

std::vector<std::size_t> default_spectral_subset(std::size_t rows);

struct SphereConfig {
  SpdeParams params{1.5, 0.5, 1.0, 2.828, 10.0, 10.0, 2};
  std::size_t modes = 1024;
  double T = 5.0;
  double h = 0.1;
  int m = 1;
  std::vector<double> snapshot_times{1.0, 2.0, 3.0, 4.0};
  std::size_t n_lat = 90;
  std::size_t n_lon = 180;
  double trace_lat_deg = 0.0;  // temporal trace location
  double trace_lon_deg = 0.0;
  double equator_time = 5.0;
  std::size_t equator_points = 360;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SphereResult {
  std::vector<FieldSnapshot> snapshots;  // points are (colatitude, longitude) in radians
  std::vector<double> trace_times;
  std::vector<double> trace_values;
  FieldSnapshot equator;
};

SphereResult sphere_experiment(const SphereConfig& config);

/// Cell-centred latitude-longitude grid as (colatitude, longitude) pairs in
/// radians, latitude-major from south to north.
std::vector<double> latlon_grid(std::size_t n_lat, std::size_t n_lon);

}  // namespace fracspde
