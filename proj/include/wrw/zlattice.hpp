#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wrw::zl {

// Dense distribution on [-radius, radius] subset Z.
struct Dense1D {
  int radius = 0;
  std::vector<double> w;  // index x + radius

  double at(int x) const {
    if (x < -radius || x > radius) return 0.0;
    return w[static_cast<std::size_t>(x + radius)];
  }
  double total() const;
};

using ZAtoms = std::vector<std::pair<int, double>>;  // finitely supported step law

void validate_symmetric_lazy_generating(const ZAtoms& atoms);

// n-fold convolution by direct stepping (exact in double arithmetic).
Dense1D power_1d(const ZAtoms& atoms, int n);

// Joint law of (w_n, w'_n) on Z^2 under the noised pair measure.
struct DensePair {
  int n = 0;  // support [-n, n]^2
  std::vector<double> w;  // (2n+1)^2 entries, row-major (x + n) * (2n+1) + (y + n)

  double at(int x, int y) const {
    if (x < -n || x > n || y < -n || y > n) return 0.0;
    return w[static_cast<std::size_t>(x + n) * static_cast<std::size_t>(2 * n + 1) +
             static_cast<std::size_t>(y + n)];
  }
};

// pi^rho_n via the characteristic function: (pi_hat)^n is a trigonometric
// polynomial of degree <= n per axis, so sampling it on an N >= 2n+1 grid and
// inverting with an FFT reconstructs the distribution exactly up to roundoff.
DensePair pair_distribution_dft(const ZAtoms& atoms, double rho, int n);

// Reference implementation by dense stepping; used to cross-check the DFT
// route at small n.
DensePair pair_distribution_stepping(const ZAtoms& atoms, double rho, int n);

// ||pair - mu_n x mu_n||_TV with the product evaluated from the 1-D law.
double pair_tv_vs_product(const DensePair& pair, const Dense1D& mu_n);

}  // namespace wrw::zl
