#include "fracspde/noise.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracspde/error.hpp"
#include "fracspde/kernel.hpp"
#include "fracspde/parallel.hpp"
#include "fracspde/rng.hpp"
#include "fracspde/special.hpp"

namespace fracspde {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

IncrementCovariance sigma_matrix(double mu, double a, double b, int m) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("sigma_matrix: mu must be non-negative");
  if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("sigma_matrix: need 0 <= a < b");
  if (m < 0 || m > kMaxPolyOrder) throw std::invalid_argument("sigma_matrix: order must lie in [0, 3]");

  const int max_power = 2 * m;
  const double rate = 2.0 * mu;
  const double length = b - a;
  const double x = rate * length;
  std::vector<double> moments(max_power + 1);  // I_p = int_a^b (s/b)^p e^{-2 mu (b-s)} ds

  if (mu > 0.0 && rate * b >= 4.0 * std::max(max_power, 1)) {
    moments[0] = -std::expm1(-x) / rate;
    const double log_ratio = (a > 0.0) ? std::log(a / b) : -std::numeric_limits<double>::infinity();
    for (int p = 1; p <= max_power; ++p) {
      const double boundary = (a > 0.0) ? -std::expm1(p * log_ratio - x) / rate : 1.0 / rate;
      moments[p] = boundary - p / (rate * b) * moments[p - 1];
    }
  } else {
    // s = b - u: (s/b)^p = sum_q C(p,q) (-u/b)^q, and
    // int_0^L u^q e^{-x u / L} du = L^{q+1} * gamma(q+1, x) / x^{q+1}.
    const double r = length / b;
    std::vector<double> scaled(max_power + 1);
    for (int q = 0; q <= max_power; ++q) scaled[q] = special::scaled_lower_gamma(q + 1.0, x);
    for (int p = 0; p <= max_power; ++p) {
      double sum = 0.0;
      double rq = 1.0;
      for (int q = 0; q <= p; ++q) {
        sum += ((q % 2 == 0) ? 1.0 : -1.0) * binomial(p, q) * rq * scaled[q];
        rq *= r;
      }
      moments[p] = length * sum;
    }
  }

  IncrementCovariance cov;
  cov.mu = mu;
  cov.a = a;
  cov.b = b;
  cov.m = m;
  const std::size_t dim = static_cast<std::size_t>(m) + 1;
  cov.sigma.resize(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) cov.sigma[i * dim + j] = moments[i + j];
  return cov;
}

NoiseBlock::NoiseBlock(TemporalMesh mesh, std::vector<double> modes, int m, std::size_t intervals,
                       std::uint64_t seed, std::string policy)
    : mesh_(std::move(mesh)),
      modes_(std::move(modes)),
      m_(m),
      intervals_(intervals),
      seed_(seed),
      policy_(std::move(policy)) {
  if (m < 0 || m > kMaxPolyOrder) throw std::invalid_argument("noise block: order must lie in [0, 3]");
  if (intervals_ == 0 || intervals_ > mesh_.intervals())
    throw std::invalid_argument("noise block: interval count out of range");
  w_.assign(modes_.size() * intervals_ * (static_cast<std::size_t>(m_) + 1), 0.0);
}

NoiseSampler::NoiseSampler(TemporalMesh mesh, std::vector<double> modes, int m, std::size_t intervals)
    : mesh_(std::move(mesh)), modes_(std::move(modes)), m_(m), intervals_(intervals) {
  if (intervals_ == 0) intervals_ = mesh_.intervals();
  if (intervals_ > mesh_.intervals()) throw std::invalid_argument("noise sampler: interval count exceeds mesh");
  if (modes_.empty()) throw std::invalid_argument("noise sampler: no modes");
  for (double mu : modes_)
    if (!(mu > 0.0)) throw std::invalid_argument("noise sampler: every mu_k must be positive");
  factors_.resize(modes_.size() * intervals_);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    for (std::size_t ell = 1; ell <= intervals_; ++ell) {
      const auto cov = sigma_matrix(modes_[k], mesh_.node(ell - 1), mesh_.node(ell), m_);
      try {
        factors_[k * intervals_ + (ell - 1)] = linalg::cholesky(cov.sigma, static_cast<std::size_t>(m_) + 1);
      } catch (const FactorizationError& e) {
        throw FactorizationError(std::string(e.what()) + " (interval " + std::to_string(ell) + ", mode " +
                                 std::to_string(k + 1) + ")");
      }
    }
  }
}

NoiseBlock NoiseSampler::sample(std::uint64_t seed, int threads) const {
  NoiseBlock block(mesh_, modes_, m_, intervals_, seed, kStreamPolicy);
  const std::size_t dim = static_cast<std::size_t>(m_) + 1;
  parallel_for(modes_.size(), threads, [&](std::size_t k) {
    double z[kMaxPolyOrder + 1];
    for (std::size_t ell = 1; ell <= intervals_; ++ell) {
      rng::NormalStream stream(seed, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(ell));
      for (std::size_t j = 0; j < dim; ++j) z[j] = stream.next();
      factor(ell, k).apply({z, dim}, block.increments(ell, k));
    }
  });
  return block;
}

NoiseBlock sample_block(const TemporalMesh& mesh, std::span<const double> modes, int m, std::uint64_t seed,
                        std::size_t intervals, int threads) {
  return NoiseSampler(mesh, std::vector<double>(modes.begin(), modes.end()), m, intervals).sample(seed, threads);
}

NoiseBlock restrict_noise(const NoiseBlock& fine) {
  const TemporalMesh& mesh = fine.mesh();
  if (mesh.intervals() % 2 != 0 || fine.intervals() % 2 != 0)
    throw std::invalid_argument("restrict_noise: interval count must be even");
  if (!mesh.is_uniform(1e-9)) throw std::invalid_argument("restrict_noise: mesh must be uniform");

  TemporalMesh coarse_mesh = TemporalMesh::uniform(mesh.end_time(), mesh.intervals() / 2);
  const std::size_t coarse_intervals = fine.intervals() / 2;
  NoiseBlock coarse(coarse_mesh, std::vector<double>(fine.modes().begin(), fine.modes().end()), fine.order(),
                    coarse_intervals, fine.seed(), fine.policy() + "|restrict2");
  const int m = fine.order();
  for (std::size_t k = 0; k < fine.mode_count(); ++k) {
    const double mu = fine.modes()[k];
    for (std::size_t i = 1; i <= coarse_intervals; ++i) {
      const std::size_t left = 2 * i - 1;
      const std::size_t right = 2 * i;
      const double decay = std::exp(-mu * mesh.step(right));
      const double ratio = mesh.node(left) / mesh.node(right);
      const auto wl = fine.increments(left, k);
      const auto wr = fine.increments(right, k);
      auto out = coarse.increments(i, k);
      double scale = decay;
      for (int j = 0; j <= m; ++j) {
        out[j] = scale * wl[j] + wr[j];
        scale *= ratio;
      }
    }
  }
  return coarse;
}

void write_noise_csv(std::ostream& os, const NoiseBlock& block) {
  os << "ell,j,k,w\n";
  char buf[96];
  for (std::size_t k = 0; k < block.mode_count(); ++k) {
    for (std::size_t ell = 1; ell <= block.intervals(); ++ell) {
      const auto w = block.increments(ell, k);
      for (std::size_t j = 0; j < w.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g\n", ell, j, k + 1, w[j]);
        os << buf;
      }
    }
  }
}

NoiseBlock read_noise_csv(std::istream& is, const TemporalMesh& mesh, std::vector<double> modes, int m,
                          std::uint64_t seed) {
  std::string line;
  if (!std::getline(is, line) || line != "ell,j,k,w") throw std::runtime_error("noise csv: bad header");
  std::size_t max_ell = 0;
  struct Row {
    std::size_t ell, j, k;
    double w;
  };
  std::vector<Row> parsed;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%zu,%zu,%zu,%lf", &r.ell, &r.j, &r.k, &r.w) != 4)
      throw std::runtime_error("noise csv: malformed row '" + line + "'");
    max_ell = std::max(max_ell, r.ell);
    parsed.push_back(r);
  }
  const std::size_t mode_count = modes.size();
  NoiseBlock block(mesh, std::move(modes), m, max_ell, seed, "csv");
  if (parsed.size() != mode_count * max_ell * (static_cast<std::size_t>(m) + 1))
    throw std::runtime_error("noise csv: row count does not match mesh, modes and order");
  for (const auto& r : parsed) {
    if (r.ell == 0 || r.k == 0 || r.k > mode_count || r.j > static_cast<std::size_t>(m))
      throw std::runtime_error("noise csv: index out of range");
    block.increments(r.ell, r.k - 1)[r.j] = r.w;
  }
  return block;
}

}  // namespace fracspde
