#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fracspde/kernel.hpp"
#include "fracspde/mesh.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/spectral.hpp"

namespace fracspde {

/// Counts accumulated (output, interval, mode) terms; each term costs m+1
/// multiply-adds.
struct SimulationStats {
  std::uint64_t terms = 0;
};

struct CoefficientPath {
  std::size_t k = 0;  // 0-based mode index
  std::vector<double> times;
  std::vector<double> values;
  std::string scheme;
  std::uint64_t seed = 0;
  std::string mesh_id;
};

std::string describe(const Scheme& scheme);
std::string mesh_id(const TemporalMesh& mesh);

/// Evaluates c~_k(t_n) = (sqrt(lambda_k) / Gamma(gamma)) sum_{ell <= n} e^{-mu_k (t_n - t_ell)}
///                       sum_j b_{n,ell,j} t_ell^j w_{ell,j,k}
/// at fixed output nodes for any number of noise blocks. Kernel surrogates are
/// built once; the full per-term weights are cached when they fit in
/// `cache_limit` doubles, and the uncached path produces identical bits.
class PathSimulator {
 public:
  static constexpr std::size_t kDefaultCacheLimit = std::size_t{1} << 24;

  PathSimulator(double gamma, ModeSpectrum spectrum, TemporalMesh mesh, Scheme scheme,
                std::vector<double> output_times, std::size_t cache_limit = kDefaultCacheLimit);

  std::size_t modes() const { return spectrum_.mu.size(); }
  std::size_t outputs() const { return out_nodes_.size(); }
  std::span<const double> output_times() const { return out_times_; }
  /// Number of leading intervals a noise block must cover.
  std::size_t required_intervals() const { return required_; }
  bool cached() const { return !weights_.empty(); }
  const TemporalMesh& mesh() const { return mesh_; }
  const Scheme& scheme() const { return scheme_; }

  /// out[k * outputs() + i] = c~_k(t*_i). Throws std::invalid_argument when the
  /// noise does not match the mesh, order or leading modes.
  void evaluate(const NoiseBlock& noise, std::span<double> out, int threads = 1,
                SimulationStats* stats = nullptr) const;

  std::vector<CoefficientPath> run(const NoiseBlock& noise, int threads = 1,
                                   SimulationStats* stats = nullptr) const;

 private:
  void check_noise(const NoiseBlock& noise) const;
  std::uint64_t evaluate_mode(const NoiseBlock& noise, std::size_t k, double* out) const;

  double gamma_;
  ModeSpectrum spectrum_;
  TemporalMesh mesh_;
  Scheme scheme_;
  int order_;
  std::vector<double> out_times_;
  std::vector<std::size_t> out_nodes_;
  std::size_t required_ = 0;
  std::vector<double> scale_;                   // sqrt(lambda_k) / Gamma(gamma)
  std::vector<std::vector<double>> poly_;       // per output: b_{n,ell,j} t_ell^j, [ell-1][j]
  std::vector<std::size_t> first_;              // per (k, i): first interval not underflowed
  std::vector<double> weights_;                 // optional full weights
  std::vector<std::size_t> weight_offset_;      // per (k, i)
};

std::vector<CoefficientPath> simulate_paths(double gamma, const ModeSpectrum& spectrum, const TemporalMesh& mesh,
                                            const Scheme& scheme, std::span<const double> output_times,
                                            const NoiseBlock& noise, int threads = 1,
                                            SimulationStats* stats = nullptr);

/// Uses the first basis.size() modes of the noise block.
std::vector<CoefficientPath> simulate_paths(const SpdeParams& params, const EigenBasis& basis,
                                            const TemporalMesh& mesh, const Scheme& scheme,
                                            std::span<const double> output_times, const NoiseBlock& noise,
                                            int threads = 1, SimulationStats* stats = nullptr);

struct FieldSnapshot {
  double time = 0.0;
  int point_dim = 0;
  std::vector<double> points;  // point_dim coordinates per point
  std::vector<double> values;
  std::size_t modes = 0;

  std::size_t size() const { return values.size(); }
};

/// X(t, x) = sum_k coeffs[k] e_k(x), summed in ascending k. `points` holds
/// basis.point_dim() coordinates per point; coeffs may be shorter than the basis.
FieldSnapshot assemble_field(std::span<const double> coeffs, double time, const EigenBasis& basis,
                             std::span<const double> points);

/// Picks output `index` of every path as the coefficient vector.
FieldSnapshot assemble_field(std::span<const CoefficientPath> paths, std::size_t index, const EigenBasis& basis,
                             std::span<const double> points);

struct RelativeError {
  double value = 0.0;
  double stderr_jackknife = 0.0;
};

/// sqrt(mean (ref - approx)^2 / mean ref^2) over replicas, with a leave-one-out
/// jackknife standard error.
RelativeError relative_rmse(std::span<const double> reference, std::span<const double> approx);

}  // namespace fracspde
