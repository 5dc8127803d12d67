#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "wrw/gauss.hpp"

using namespace wrw;

namespace {

GroupElement gen(const Group& g, const std::string& name) {
  for (std::size_t i = 0; i < g.generator_names().size(); ++i)
    if (g.generator_names()[i] == name) return g.generator_elements()[i];
  throw std::runtime_error("no generator named " + name);
}

Measure z_lazy_simple(const Group& z, double lazy) {
  GroupElement plus = z.identity(), minus = z.identity();
  plus.t[0] = 1;
  minus.t[0] = -1;
  return measure_from_atoms<double>(
      z, {{z.identity(), lazy}, {plus, (1 - lazy) / 2}, {minus, (1 - lazy) / 2}});
}

}  // namespace

TEST_CASE("xi at the identity and at the basic translation") {
  Group g = Group::builtin("A1");
  Covariance sigma;
  sigma.mat = Eigen::MatrixXd::Constant(1, 1, 1.0 / 6.0);
  const int n = 100;
  CHECK(xi(g, sigma, n, g.identity()) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * n / 6.0)).epsilon(1e-14));
  const GroupElement t1 = g.multiply(gen(g, "s2"), gen(g, "s1"));  // Phi = 1
  CHECK(xi(g, sigma, n, t1) ==
        doctest::Approx(std::exp(-6.0 / 200.0) / std::sqrt(2.0 * std::numbers::pi * n / 6.0))
            .epsilon(1e-14));
}

TEST_CASE("xi depends only on the quadratic form value") {
  Group g = Group::builtin("A1");
  Covariance sigma;
  sigma.mat = Eigen::MatrixXd::Constant(1, 1, 0.21);
  GroupElement plus = g.identity(), minus = g.identity();
  plus.t[0] = 3;
  minus.t[0] = -3;  // Phi = +-3: equal quadratic form
  CHECK(xi(g, sigma, 7, plus) == doctest::Approx(xi(g, sigma, 7, minus)).epsilon(1e-15));
}

TEST_CASE("discrete normal: normalization and Z -> 1") {
  Group g = Group::builtin("A1");
  Covariance sigma = covariance(build_network(g, lazy_uniform(g, 1.0 / 3.0)));
  DiscreteNormal dn = discrete_normal(g, sigma, 50);
  CHECK(std::abs(dn.Z - 1.0) < 1e-6);
  CHECK(std::abs(dn.measure.total_mass() - 1.0) < 1e-12);
  CHECK(dn.radius >= 3 * std::sqrt(50.0 * std::log(50.0)) - 1);
  CHECK(dn.tail_bound < 1e-12);
}

TEST_CASE("Z approaches |W|-corrected unity exponentially") {
  // Small per-step variance slows the theta-series convergence enough to
  // watch log|Z - 1| decay linearly before hitting the double-precision floor.
  Group g = Group::builtin("A1");
  const double lazy = 0.99;
  Covariance sigma = covariance(build_network(g, lazy_uniform(g, lazy)));
  std::vector<double> logdev;
  for (int n : {10, 20, 40, 80}) {
    DiscreteNormal dn = discrete_normal(g, sigma, n);
    REQUIRE(std::abs(dn.Z - 1.0) > 0.0);
    logdev.push_back(std::log(std::abs(dn.Z - 1.0)));
  }
  for (std::size_t i = 1; i < logdev.size(); ++i) CHECK(logdev[i] < logdev[i - 1]);
  // Slopes per unit n over successive doublings stay within 40%: the decay is
  // asymptotically a single exponential.
  const double s1 = (logdev[2] - logdev[1]) / 20.0;
  const double s2 = (logdev[3] - logdev[2]) / 40.0;
  CHECK(s1 < 0.0);
  CHECK(s2 < 0.0);
  CHECK(std::abs(s2 - s1) < 0.4 * std::abs(s1));
}

TEST_CASE("Z deviation for the planar built-ins at moderate n") {
  for (const char* name : {"A2", "C2"}) {
    Group g = Group::builtin(name);
    Covariance sigma = covariance(build_network(g, lazy_uniform(g, 1.0 / 3.0)));
    DiscreteNormal dn = discrete_normal(g, sigma, 50);
    CHECK(std::abs(dn.Z - 1.0) < 1e-6);
  }
}

TEST_CASE("Poisson summation on Z^m ties both theta series together") {
  auto direct_sum = [](const Eigen::MatrixXd& sigma, int n) {
    const int m = static_cast<int>(sigma.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const int R = static_cast<int>(std::ceil(12.0 * std::sqrt(n * es.eigenvalues().maxCoeff()))) + 5;
    const Eigen::MatrixXd inv = sigma.inverse();
    const double pref =
        1.0 / (std::pow(2.0 * std::numbers::pi * n, 0.5 * m) * std::sqrt(sigma.determinant()));
    double total = 0.0;
    if (m == 1) {
      for (int x = -R; x <= R; ++x) total += pref * std::exp(-0.5 * x * inv(0, 0) * x / n);
    } else {
      for (int x = -R; x <= R; ++x)
        for (int y = -R; y <= R; ++y) {
          Eigen::Vector2d v(x, y);
          total += pref * std::exp(-0.5 * v.dot(inv * v) / n);
        }
    }
    return total;
  };
  auto dual_sum = [](const Eigen::MatrixXd& sigma, int n) {
    const int m = static_cast<int>(sigma.rows());
    const double c = 2.0 * std::numbers::pi * std::numbers::pi * n;
    double total = 0.0;
    const int R = 40;
    if (m == 1) {
      for (int k = -R; k <= R; ++k) total += std::exp(-c * k * sigma(0, 0) * k);
    } else {
      for (int k = -R; k <= R; ++k)
        for (int l = -R; l <= R; ++l) {
          Eigen::Vector2d v(k, l);
          total += std::exp(-c * v.dot(sigma * v));
        }
    }
    return total;
  };

  Eigen::MatrixXd s1 = Eigen::MatrixXd::Constant(1, 1, 0.8);
  Eigen::MatrixXd s2(2, 2);
  s2 << 0.9, 0.25, 0.25, 0.6;
  for (int n : {1, 2, 5}) {
    CHECK(std::abs(direct_sum(s1, n) - dual_sum(s1, n)) < 1e-10);
    CHECK(std::abs(direct_sum(s2, n) - dual_sum(s2, n)) < 1e-10);
  }
}

TEST_CASE("truncation certificate gives up on absurd covariances") {
  Group z = Group::free_abelian(1);
  Covariance huge;
  huge.mat = Eigen::MatrixXd::Constant(1, 1, 1e6);
  CHECK_THROWS_AS(discrete_normal(z, huge, 10), TruncationInsufficient);
}

TEST_CASE("sup error scaling on the uniform A1 walk stays bounded") {
  Group g = Group::builtin("A1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  Covariance sigma = covariance(build_network(g, mu));
  std::vector<double> normalized;
  for (int n : {50, 100, 200, 400})
    normalized.push_back(n * lclt_sup_error(g, mu, sigma, n));
  for (std::size_t i = 1; i < normalized.size(); ++i) {
    CHECK(normalized[i] <= 2.0 * normalized[0]);
    CHECK(normalized[i] <= 1.2 * normalized[i - 1]);  // no doubling
  }
}

TEST_CASE("sup error scaling on A2") {
  Group g = Group::builtin("A2");
  Measure mu = lazy_uniform(g, 0.25);
  Covariance sigma = covariance(build_network(g, mu));
  std::vector<double> normalized;
  for (int n : {30, 60, 120})
    normalized.push_back(std::pow(n, 1.5) * lclt_sup_error(g, mu, sigma, n));
  for (std::size_t i = 1; i < normalized.size(); ++i) {
    CHECK(normalized[i] <= 1.3 * normalized[0]);
    CHECK(normalized[i] <= 1.2 * normalized[i - 1]);
  }
}

TEST_CASE("tv error: range and near-monotone decay") {
  Group g = Group::builtin("A1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  Covariance sigma = covariance(build_network(g, mu));
  double prev = -1.0;
  for (int n : {25, 50, 100, 200}) {
    const double tv = lclt_tv_error(g, mu, sigma, n);
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
    if (prev >= 0.0) CHECK(tv <= 1.2 * prev);
    prev = tv;
  }
}

TEST_CASE("lazy simple walk on Z: n * TV sits in a fixed bracket") {
  Group z = Group::free_abelian(1);
  Measure mu = z_lazy_simple(z, 1.0 / 3.0);
  Covariance sigma = covariance(build_network(z, mu));
  CHECK(sigma.mat(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  std::vector<double> scaled;
  for (int n : {100, 200, 400}) scaled.push_back(n * lclt_tv_error(z, mu, sigma, n));
  const double lo = *std::min_element(scaled.begin(), scaled.end());
  const double hi = *std::max_element(scaled.begin(), scaled.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 10.0);
}

TEST_CASE("preconditions") {
  Group g = Group::builtin("A1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  Covariance sigma = covariance(build_network(g, mu));
  CHECK_THROWS_AS(lclt_sup_error(g, mu, sigma, 0), std::invalid_argument);
  CHECK_THROWS_AS(lclt_tv_error(g, mu, sigma, 1), std::invalid_argument);
  Measure nonlazy = measure_from_atoms<double>(
      g, {{gen(g, "s1"), 0.5}, {gen(g, "s2"), 0.5}});
  CHECK_THROWS_AS(lclt_sup_error(g, nonlazy, sigma, 10), std::invalid_argument);
}
