#pragma once

#include "wrw/hodge.hpp"

namespace wrw {

struct TruncationInsufficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lower quasi-isometry constants of Phi and the sphere-growth constant,
// measured on a finite ball: ||Phi(x)||_inf >= c0 |x|_S - c1 on the ball and
// |sphere(k)| <= growth (k+1)^{m-1}. Measured, not proven; they feed the
// Gaussian tail certificate.
struct QuasiIsometry {
  double c0 = 0.0;
  double c1 = 0.0;
  double growth = 0.0;
  int radius = 0;
};

QuasiIsometry measure_quasi_isometry(const Group& group, int radius = 20);

// xi_{n Sigma}(x) — the plain Gaussian density evaluated at Phi(x).
double xi(const Group& group, const Covariance& sigma, int n, const GroupElement& x);

// The image Phi(Gamma) carries |W| / covolume points per unit volume, so the
// density comparable to mu_n pointwise is xi * covolume / |W|.
double orbit_density_factor(const Group& group);

struct DiscreteNormal {
  const Group* group = nullptr;
  Covariance sigma;
  int n = 0;
  int radius = 0;        // truncation radius in word-norm units
  double trunc_const = 0.0;  // the A in R = ceil(A sqrt(n log n))
  double Z = 0.0;        // sum of the density over the truncated ball; -> 1
  double tail_bound = 0.0;   // certified mass outside the ball
  Measure measure;       // normalized atoms on ball(radius)
};

// N^Phi_{n Sigma}: density-corrected Gaussian restricted to a ball whose
// certified tail mass is below `target_tail`. The truncation constant starts
// at 3 and doubles up to 12; beyond that TruncationInsufficient is thrown.
DiscreteNormal discrete_normal(const Group& group, const Covariance& sigma, int n,
                               double target_tail = 1e-12);

// sup_x |mu_n(x) - xi~_{n Sigma}(x)| over supp(mu_n) and the truncation ball,
// with xi~ the density-corrected Gaussian.
double lclt_sup_error(const Group& group, const Measure& mu, const Covariance& sigma, int n);

// ||mu_n - N^Phi_{n Sigma}||_TV.
double lclt_tv_error(const Group& group, const Measure& mu, const Covariance& sigma, int n);

}  // namespace wrw
