#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fracspde/linalg.hpp"
#include "fracspde/mesh.hpp"

namespace fracspde {

/// Covariance of (w_0, ..., w_m) with w_j = int_a^b (s/b)^j e^{-mu (b-s)} dw(s):
/// Sigma_{ij} = int_a^b (s/b)^{i+j} e^{-2 mu (b-s)} ds.
struct IncrementCovariance {
  double mu = 0.0;
  double a = 0.0;
  double b = 1.0;
  int m = 0;
  std::vector<double> sigma;  // (m+1) x (m+1), row-major

  double operator()(int i, int j) const { return sigma[static_cast<std::size_t>(i * (m + 1) + j)]; }
};

/// Exact Sigma. Uses the integration-by-parts recursion where it is
/// forward-stable (2 mu b >= 4 (2m)), otherwise the equivalent binomial
/// expansion over int_0^{b-a} u^q e^{-2 mu u} du, which also covers mu = 0.
IncrementCovariance sigma_matrix(double mu, double a, double b, int m);

/// Sampled increments w_{ell,j,k} on the first `intervals` intervals of a mesh.
class NoiseBlock {
 public:
  NoiseBlock(TemporalMesh mesh, std::vector<double> modes, int m, std::size_t intervals,
             std::uint64_t seed, std::string policy);

  const TemporalMesh& mesh() const { return mesh_; }
  std::span<const double> modes() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }
  int order() const { return m_; }
  std::size_t intervals() const { return intervals_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& policy() const { return policy_; }

  /// (w_{ell,0,k}, ..., w_{ell,m,k}); ell is 1-based, k 0-based.
  std::span<double> increments(std::size_t ell, std::size_t k) {
    return {w_.data() + offset(ell, k), static_cast<std::size_t>(m_) + 1};
  }
  std::span<const double> increments(std::size_t ell, std::size_t k) const {
    return {w_.data() + offset(ell, k), static_cast<std::size_t>(m_) + 1};
  }
  double operator()(std::size_t ell, int j, std::size_t k) const { return increments(ell, k)[j]; }

  std::span<double> raw() { return w_; }
  std::span<const double> raw() const { return w_; }

 private:
  std::size_t offset(std::size_t ell, std::size_t k) const {
    return (k * intervals_ + (ell - 1)) * (static_cast<std::size_t>(m_) + 1);
  }

  TemporalMesh mesh_;
  std::vector<double> modes_;
  int m_;
  std::size_t intervals_;
  std::uint64_t seed_;
  std::string policy_;
  std::vector<double> w_;  // [k][ell][j]
};

inline constexpr const char* kStreamPolicy = "philox4x32-10:key=seed,ctr=(draw,ell,k)";

/// Cholesky factors of Sigma for every (ell, k), shared across seeds.
class NoiseSampler {
 public:
  NoiseSampler(TemporalMesh mesh, std::vector<double> modes, int m, std::size_t intervals = 0);

  /// Deterministic in (seed, k, ell): mode k on interval ell always reads
  /// substream (k, ell) of the seed, whatever the iteration order or threads.
  NoiseBlock sample(std::uint64_t seed, int threads = 1) const;

  const TemporalMesh& mesh() const { return mesh_; }
  std::size_t intervals() const { return intervals_; }
  const linalg::CholeskyFactor& factor(std::size_t ell, std::size_t k) const {
    return factors_[k * intervals_ + (ell - 1)];
  }

 private:
  TemporalMesh mesh_;
  std::vector<double> modes_;
  int m_;
  std::size_t intervals_;
  std::vector<linalg::CholeskyFactor> factors_;
};

/// Samples all intervals (or the first `intervals` when non-zero).
NoiseBlock sample_block(const TemporalMesh& mesh, std::span<const double> modes, int m,
                        std::uint64_t seed, std::size_t intervals = 0, int threads = 1);

/// Exact recombination of a uniform fine block onto the mesh with half the
/// intervals: w_c(j) = e^{-mu h} (t_{2i-1}/t_{2i})^j w_f(2i-1, j) + w_f(2i, j).
NoiseBlock restrict_noise(const NoiseBlock& fine);

/// CSV table with header "ell,j,k,w" and round-trip precision.
void write_noise_csv(std::ostream& os, const NoiseBlock& block);
/// Reads a table written by write_noise_csv for the given mesh and modes.
NoiseBlock read_noise_csv(std::istream& is, const TemporalMesh& mesh, std::vector<double> modes, int m,
                          std::uint64_t seed = 0);

}  // namespace fracspde
