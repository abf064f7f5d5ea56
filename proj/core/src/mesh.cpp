#include "fracspde/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracspde {

TemporalMesh::TemporalMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("mesh needs at least one interval");
  if (nodes_.front() != 0.0) throw std::invalid_argument("mesh must start at t_0 = 0");
  h_ = 0.0;
  h_min_ = INFINITY;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double step = nodes_[i] - nodes_[i - 1];
    if (!(step > 0.0) || !std::isfinite(nodes_[i]))
      throw std::invalid_argument("mesh nodes must be finite and strictly increasing (index " +
                                  std::to_string(i) + ")");
    h_ = std::max(h_, step);
    h_min_ = std::min(h_min_, step);
  }
}

TemporalMesh TemporalMesh::uniform(double T, std::size_t N) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("uniform mesh: T must be positive");
  if (N == 0) throw std::invalid_argument("uniform mesh: N must be at least 1");
  std::vector<double> nodes(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
    nodes[i] = static_cast<double>(i) * T / static_cast<double>(N);
  nodes[N] = T;
  return TemporalMesh(std::move(nodes));
}

TemporalMesh TemporalMesh::geometric(double T, std::size_t N, double ratio) {
  if (!(T > 0.0)) throw std::invalid_argument("geometric mesh: T must be positive");
  if (N == 0) throw std::invalid_argument("geometric mesh: N must be at least 1");
  if (!(ratio > 0.0)) throw std::invalid_argument("geometric mesh: ratio must be positive");
  std::vector<double> nodes(N + 1, 0.0);
  double step = 1.0;
  for (std::size_t i = 1; i <= N; ++i) {
    nodes[i] = nodes[i - 1] + step;
    step *= ratio;
  }
  const double scale = T / nodes[N];
  for (auto& t : nodes) t *= scale;
  nodes[N] = T;
  return TemporalMesh(std::move(nodes));
}

std::size_t TemporalMesh::index_of(double t, double rel_tol) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  const double tol = rel_tol * end_time();
  std::size_t best = nodes_.size();
  if (it != nodes_.end() && std::abs(*it - t) <= tol) best = static_cast<std::size_t>(it - nodes_.begin());
  if (it != nodes_.begin() && std::abs(*(it - 1) - t) <= tol)
    best = static_cast<std::size_t>(it - 1 - nodes_.begin());
  if (best == nodes_.size())
    throw std::invalid_argument("time " + std::to_string(t) + " is not a mesh node");
  return best;
}

TemporalMesh build_uniform_mesh(double T, std::size_t N) { return TemporalMesh::uniform(T, N); }

}  // namespace fracspde
