#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "fracspde/oracle.hpp"

using namespace fracspde;
using doctest::Approx;

TEST_CASE("variance at gamma = 1 is the Ornstein-Uhlenbeck variance") {
  for (double mu : {0.01, 0.1, 1.0, 30.0})
    for (double t : {0.1, 1.0, 5.0}) {
      const double ou = -std::expm1(-2.0 * mu * t) / (2.0 * mu);
      CHECK(oracle::exact_variance(mu, 2.0, 1.0, t) == Approx(2.0 * ou).epsilon(1e-13));
    }
  CHECK(oracle::exact_variance(0.1, 1.0, 1.0, 1.0) == Approx(0.9063462).epsilon(1e-7));
}

TEST_CASE("variance matches the incomplete gamma closed form") {
  for (double g : {0.6, 0.9, 1.5, 2.3})
    for (double mu : {0.2, 3.0}) {
      const double t = 1.7;
      const double a = 2.0 * g - 1.0;
      const double expect = std::pow(2.0 * mu, -a) * boost::math::tgamma_lower(a, 2.0 * mu * t) /
                            std::pow(std::tgamma(g), 2);
      CHECK(oracle::exact_variance(mu, 1.0, g, t) == Approx(expect).epsilon(1e-12));
    }
  CHECK_THROWS_AS(oracle::exact_variance(1.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("variance saturates at the stationary value") {
  for (double g : {0.7, 1.0, 2.5}) {
    const double stat = oracle::stationary_variance(0.5, 1.0, g);
    CHECK(oracle::exact_variance(0.5, 1.0, g, 200.0) == Approx(stat).epsilon(1e-12));
    CHECK(oracle::exact_variance(0.5, 1.0, g, 2.0) < stat);
  }
  CHECK(oracle::stationary_variance(0.5, 1.0, 1.0) == Approx(1.0));
}

TEST_CASE("covariance at gamma = 1 decays exponentially with the lag") {
  const double mu = 0.8;
  for (double t : {0.3, 1.0})
    for (double lag : {0.0, 0.2, 2.0}) {
      const double expect = std::exp(-mu * lag) * (-std::expm1(-2.0 * mu * t)) / (2.0 * mu);
      CHECK(oracle::exact_covariance(mu, 1.0, 1.0, t, t + lag) == Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("covariance on the diagonal equals the variance") {
  for (double g : {0.55, 0.75, 1.4, 2.2})
    CHECK(oracle::exact_covariance(1.1, 0.7, g, 0.9, 0.9) == Approx(oracle::exact_variance(1.1, 0.7, g, 0.9)).epsilon(1e-11));
}

TEST_CASE("covariance matrix is symmetric positive definite") {
  std::vector<double> times;
  for (int i = 1; i <= 12; ++i) times.push_back(i / 12.0);
  for (double g : {0.6, 0.75, 1.3, 2.0}) {
    const auto c = oracle::covariance_matrix(1.0, 1.0, g, times);
    Eigen::MatrixXd m(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) m(i, j) = c[i * 12 + j];
    CHECK((m - m.transpose()).norm() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("reference sampler reproduces its covariance") {
  const std::vector<double> times{0.25, 0.5, 1.0};
  const oracle::ReferenceSampler sampler(1.0, 1.0, 0.75, times);
  const std::size_t R = 50000;
  const auto x = sampler.sample(R, 5);
  const auto cov = sampler.covariance();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < R; ++r) s += x[r * 3 + i] * x[r * 3 + j];
      s /= R;
      const double se = std::sqrt((cov[i * 3 + i] * cov[j * 3 + j] + cov[i * 3 + j] * cov[i * 3 + j]) / R);
      CHECK(std::abs(s - cov[i * 3 + j]) < 4.0 * se);
    }
  CHECK(sampler.sample(4, 9) == oracle::cholesky_reference(1.0, 1.0, 0.75, times, 4, 9));
  std::vector<double> many(65);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = (i + 1) / 65.0;
  CHECK_THROWS(oracle::ReferenceSampler(1.0, 1.0, 0.75, many));
}
