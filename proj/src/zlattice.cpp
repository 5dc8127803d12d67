#include "wrw/zlattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace wrw::zl {

double Dense1D::total() const { return std::accumulate(w.begin(), w.end(), 0.0); }

void validate_symmetric_lazy_generating(const ZAtoms& atoms) {
  auto weight = [&atoms](int x) {
    for (const auto& [s, w] : atoms)
      if (s == x) return w;
    return 0.0;
  };
  double mass = 0.0;
  int g = 0;
  bool lazy = false;
  for (const auto& [s, w] : atoms) {
    if (w <= 0.0) throw std::invalid_argument("step weights must be positive");
    mass += w;
    if (weight(-s) != w) throw std::invalid_argument("step law must be symmetric");
    if (s == 0) lazy = true;
    g = std::gcd(g, std::abs(s));
  }
  if (std::abs(mass - 1.0) > 1e-12) throw std::invalid_argument("step law must sum to 1");
  if (!lazy) throw std::invalid_argument("step law must be lazy (mass at 0)");
  if (g != 1) throw std::invalid_argument("step support must generate Z");
}

Dense1D power_1d(const ZAtoms& atoms, int n) {
  int reach = 0;
  for (const auto& [s, w] : atoms) reach = std::max(reach, std::abs(s));
  Dense1D cur;
  cur.radius = reach * n;
  cur.w.assign(static_cast<std::size_t>(2 * cur.radius + 1), 0.0);
  cur.w[static_cast<std::size_t>(cur.radius)] = 1.0;
  std::vector<double> next(cur.w.size(), 0.0);
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    const int lim = reach * (step + 1);
    for (int x = -lim; x <= lim; ++x) {
      double acc = 0.0;
      for (const auto& [s, w] : atoms) acc += w * cur.at(x - s);
      next[static_cast<std::size_t>(x + cur.radius)] = acc;
    }
    cur.w.swap(next);
  }
  return cur;
}

namespace {

double mu_hat(const ZAtoms& atoms, double theta) {
  double v = 0.0;
  for (const auto& [s, w] : atoms) v += w * std::cos(2.0 * std::numbers::pi * s * theta);
  return v;
}

double signed_pow(double base, int n) {
  if (base == 0.0) return 0.0;
  const double mag = std::pow(std::abs(base), n);
  return (base < 0.0 && (n % 2)) ? -mag : mag;
}

}  // namespace

DensePair pair_distribution_dft(const ZAtoms& atoms, double rho, int n) {
  validate_symmetric_lazy_generating(atoms);
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [0, 1]");
  int reach = 0;
  for (const auto& [s, w] : atoms) reach = std::max(reach, std::abs(s));
  const int support = reach * n;

  // Grid size: a power of two with N >= 2 * support + 1 avoids aliasing.
  int N = 1;
  while (N < 2 * support + 1) N <<= 1;

  // mu_hat is 1-periodic; one table serves both axes and the shared argument
  // (j + k)/N.
  std::vector<double> mh(static_cast<std::size_t>(2 * N));
  for (int j = 0; j < 2 * N; ++j)
    mh[static_cast<std::size_t>(j)] = mu_hat(atoms, static_cast<double>(j) / N);

  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
  if (!buf) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_2d(N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);

  for (int j = 0; j < N; ++j) {
    const double mj = mh[static_cast<std::size_t>(j)];
    for (int k = 0; k < N; ++k) {
      const double ph = rho * mj * mh[static_cast<std::size_t>(k)] +
                        (1.0 - rho) * mh[static_cast<std::size_t>(j + k)];
      const std::size_t idx = static_cast<std::size_t>(j) * N + k;
      buf[idx][0] = signed_pow(ph, n);
      buf[idx][1] = 0.0;
    }
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  DensePair out;
  out.n = support;
  const std::size_t side = static_cast<std::size_t>(2 * support + 1);
  out.w.assign(side * side, 0.0);
  const double scale = 1.0 / (static_cast<double>(N) * N);
  for (int x = -support; x <= support; ++x) {
    const int jx = (x % N + N) % N;
    for (int y = -support; y <= support; ++y) {
      const int ky = (y % N + N) % N;
      const double v =
          buf[static_cast<std::size_t>(jx) * N + static_cast<std::size_t>(ky)][0] * scale;
      out.w[static_cast<std::size_t>(x + support) * side + static_cast<std::size_t>(y + support)] =
          std::max(v, 0.0);
    }
  }
  fftw_free(buf);
  return out;
}

DensePair pair_distribution_stepping(const ZAtoms& atoms, double rho, int n) {
  validate_symmetric_lazy_generating(atoms);
  int reach = 0;
  for (const auto& [s, w] : atoms) reach = std::max(reach, std::abs(s));
  const int support = reach * n;

  // Pair step law.
  std::vector<std::pair<std::pair<int, int>, double>> step;
  for (const auto& [s, ws] : atoms)
    for (const auto& [t, wt] : atoms) {
      double w = rho * ws * wt;
      if (s == t) w += (1.0 - rho) * ws;
      if (w > 0.0) step.push_back({{s, t}, w});
    }

  DensePair cur;
  cur.n = support;
  const std::size_t side = static_cast<std::size_t>(2 * support + 1);
  cur.w.assign(side * side, 0.0);
  cur.w[static_cast<std::size_t>(support) * side + static_cast<std::size_t>(support)] = 1.0;
  std::vector<double> next(cur.w.size());
  for (int k = 0; k < n; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    const int lim = reach * (k + 1);
    for (int x = -lim; x <= lim; ++x)
      for (int y = -lim; y <= lim; ++y) {
        double acc = 0.0;
        for (const auto& [st, w] : step) acc += w * cur.at(x - st.first, y - st.second);
        next[static_cast<std::size_t>(x + support) * side + static_cast<std::size_t>(y + support)] =
            acc;
      }
    cur.w.swap(next);
  }
  return cur;
}

double pair_tv_vs_product(const DensePair& pair, const Dense1D& mu_n) {
  long double total = 0.0L;
  for (int x = -pair.n; x <= pair.n; ++x) {
    const double px = mu_n.at(x);
    for (int y = -pair.n; y <= pair.n; ++y)
      total += std::abs(pair.at(x, y) - px * mu_n.at(y));
  }
  return static_cast<double>(total / 2.0L);
}

}  // namespace wrw::zl
