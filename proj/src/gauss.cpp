#include "wrw/gauss.hpp"

#include <cmath>
#include <numbers>

namespace wrw {

QuasiIsometry measure_quasi_isometry(const Group& group, int radius) {
  Ball ball = group.ball(radius);
  QuasiIsometry qi;
  qi.radius = radius;
  qi.c0 = std::numeric_limits<double>::infinity();
  std::vector<int> sphere(static_cast<std::size_t>(radius) + 1, 0);
  std::vector<double> phi_inf(ball.elems.size());
  for (std::size_t i = 0; i < ball.elems.size(); ++i) {
    phi_inf[i] = group.embed(ball.elems[i]).cwiseAbs().maxCoeff();
    const int k = ball.norm[i];
    sphere[static_cast<std::size_t>(k)] += 1;
    if (k >= 5) qi.c0 = std::min(qi.c0, phi_inf[i] / k);
  }
  if (!std::isfinite(qi.c0) || qi.c0 <= 0.0)
    throw std::runtime_error("quasi-isometry measurement failed; ball too small");
  for (std::size_t i = 0; i < ball.elems.size(); ++i)
    qi.c1 = std::max(qi.c1, qi.c0 * ball.norm[i] - phi_inf[i]);
  const int m = group.rank();
  for (int k = 0; k <= radius; ++k)
    qi.growth = std::max(qi.growth, sphere[static_cast<std::size_t>(k)] /
                                        std::pow(k + 1.0, m - 1));
  return qi;
}

double xi(const Group& group, const Covariance& sigma, int n, const GroupElement& x) {
  const int m = group.rank();
  const Eigen::VectorXd phi = group.embed(x);
  const double q = phi.dot(sigma.mat.ldlt().solve(phi)) / n;
  const double det = sigma.mat.determinant();
  return std::exp(-0.5 * q) /
         (std::pow(2.0 * std::numbers::pi * n, 0.5 * m) * std::sqrt(det));
}

double orbit_density_factor(const Group& group) {
  return group.covolume() / static_cast<double>(group.weyl_order());
}

namespace {

// Upper bound on the density-corrected Gaussian mass outside ball(R), from the
// measured growth and quasi-isometry constants.
double tail_certificate(const Group& group, const Covariance& sigma, int n, int R,
                        const QuasiIsometry& qi) {
  const int m = group.rank();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.mat);
  const double alpha = 1.0 / es.eigenvalues().maxCoeff();
  const double pref = orbit_density_factor(group) /
                      (std::pow(2.0 * std::numbers::pi * n, 0.5 * m) *
                       std::sqrt(sigma.mat.determinant()));
  double total = 0.0;
  const int hard_stop = R + 200 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 2000;
  for (int k = R; k <= hard_stop; ++k) {
    const double reach = std::max(qi.c0 * k - qi.c1, 0.0);
    const double term =
        qi.growth * std::pow(k + 1.0, m - 1) * pref * std::exp(-0.5 * alpha * reach * reach / n);
    total += term;
    if (term < 1e-18 * std::max(total, 1e-300) && reach > 0.0) break;
  }
  return total;
}

}  // namespace

DiscreteNormal discrete_normal(const Group& group, const Covariance& sigma, int n,
                               double target_tail) {
  if (n < 1) throw std::invalid_argument("discrete_normal: n must be >= 1");
  const QuasiIsometry qi = measure_quasi_isometry(group);
  DiscreteNormal dn;
  dn.group = &group;
  dn.sigma = sigma;
  dn.n = n;

  const double logn = std::max(std::log(static_cast<double>(n)), 1.0);
  bool certified = false;
  for (double A = 3.0; A <= 12.0; A *= 2.0) {
    const int R = static_cast<int>(std::ceil(A * std::sqrt(n * logn)));
    const double tail = tail_certificate(group, sigma, n, R, qi);
    if (tail < target_tail) {
      dn.radius = R;
      dn.trunc_const = A;
      dn.tail_bound = tail;
      certified = true;
      break;
    }
  }
  if (!certified)
    throw TruncationInsufficient(
        "Gaussian tail certificate failed up to the truncation-constant cap");

  Ball ball = group.ball(dn.radius);
  const double factor = orbit_density_factor(group);
  std::vector<std::pair<GroupElement, double>> atoms;
  atoms.reserve(ball.elems.size());
  double z = 0.0;
  for (const auto& e : ball.elems) {
    const double v = factor * xi(group, sigma, n, e);
    z += v;
    atoms.emplace_back(e, v);
  }
  dn.Z = z;
  for (auto& [e, w] : atoms) w /= z;
  dn.measure = measure_from_atoms(group, std::move(atoms));
  return dn;
}

double lclt_sup_error(const Group& group, const Measure& mu, const Covariance& sigma, int n) {
  if (n < 1) throw std::invalid_argument("lclt_sup_error: n must be >= 1");
  if (!(mu.weight(group.identity()) > 0.0))
    throw std::invalid_argument("lclt_sup_error: mu must be lazy (mu(id) > 0)");
  const Measure mu_n = power(mu, n);
  const DiscreteNormal dn = discrete_normal(group, sigma, n);
  const double factor = orbit_density_factor(group);

  double sup = 0.0;
  for (const auto& [x, w] : mu_n.atoms)
    sup = std::max(sup, std::abs(w - factor * xi(group, sigma, n, x)));
  Ball ball = group.ball(dn.radius);
  for (const auto& x : ball.elems)
    sup = std::max(sup, std::abs(mu_n.weight(x) - factor * xi(group, sigma, n, x)));
  return sup;
}

double lclt_tv_error(const Group& group, const Measure& mu, const Covariance& sigma, int n) {
  if (n < 2) throw std::invalid_argument("lclt_tv_error: n must be >= 2");
  if (!(mu.weight(group.identity()) > 0.0))
    throw std::invalid_argument("lclt_tv_error: mu must be lazy (mu(id) > 0)");
  const Measure mu_n = power(mu, n);
  const DiscreteNormal dn = discrete_normal(group, sigma, n);
  return tv_distance(mu_n, dn.measure);
}

}  // namespace wrw
