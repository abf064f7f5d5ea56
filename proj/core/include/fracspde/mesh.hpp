#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracspde {

/// Ordered time grid 0 = t_0 < t_1 < ... < t_N = T.
///
/// Intervals are numbered 1..N; interval ell is [t_{ell-1}, t_ell).
class TemporalMesh {
 public:
  explicit TemporalMesh(std::vector<double> nodes);

  /// t_ell = ell * T / N. Nodes of a mesh with 2N intervals contain these
  /// bit-for-bit at even indices.
  static TemporalMesh uniform(double T, std::size_t N);
  /// Steps grow by `ratio` from one interval to the next.
  static TemporalMesh geometric(double T, std::size_t N, double ratio);

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::size_t intervals() const { return nodes_.size() - 1; }
  double end_time() const { return nodes_.back(); }

  double step(std::size_t ell) const { return nodes_[ell] - nodes_[ell - 1]; }
  double max_step() const { return h_; }
  double min_step() const { return h_min_; }
  double ratio() const { return h_ / h_min_; }
  bool is_uniform(double rel_tol = 1e-12) const { return ratio() - 1.0 <= rel_tol; }

  /// Index n with t_n == t (within rel_tol * T); throws if t is not a node.
  std::size_t index_of(double t, double rel_tol = 1e-12) const;

 private:
  std::vector<double> nodes_;
  double h_ = 0.0;
  double h_min_ = 0.0;
};

TemporalMesh build_uniform_mesh(double T, std::size_t N);

}  // namespace fracspde
