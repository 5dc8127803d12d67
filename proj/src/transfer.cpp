#include "wrw/transfer.hpp"

#include "wrw/util.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace wrw {

namespace {

using LD = long double;
using MatrixXcld = Eigen::Matrix<std::complex<LD>, Eigen::Dynamic, Eigen::Dynamic>;

constexpr LD kTwoPi = 2.0L * std::numbers::pi_v<LD>;

MatrixXcld assemble(const QuotientNetwork& net, const Eigen::VectorXd& omega) {
  const int n = net.num_vertices();
  MatrixXcld mat = MatrixXcld::Zero(n, n);
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    const LD phase = kTwoPi * static_cast<LD>(omega[e]);
    mat(ed.origin, ed.target) +=
        static_cast<LD>(ed.p) * std::complex<LD>(std::cos(phase), std::sin(phase));
  }
  return mat;
}

struct SpectrumLD {
  Eigen::Matrix<LD, Eigen::Dynamic, 1> eigenvalues;  // ascending
  MatrixXcld eigenvectors;
};

SpectrumLD spectrum(const QuotientNetwork& net, const Eigen::VectorXd& omega, bool vectors) {
  Eigen::SelfAdjointEigenSolver<MatrixXcld> es;
  es.compute(assemble(net, omega),
             vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw TransferError("transfer eigensolver failed");
  SpectrumLD s;
  s.eigenvalues = es.eigenvalues();
  if (vectors) s.eigenvectors = es.eigenvectors();
  return s;
}

LD beta_ld(const QuotientNetwork& net, const Eigen::VectorXd& v) {
  Eigen::VectorXd omega(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e)
    omega[e] = v.dot(net.edges[static_cast<std::size_t>(e)].disp);
  const auto s = spectrum(net, omega, false);
  const LD lambda = s.eigenvalues[s.eigenvalues.size() - 1];
  if (!(lambda > 0.0L))
    throw NonPositiveLeadEigenvalue("leading eigenvalue is not positive; beta undefined");
  return std::log(lambda);
}

}  // namespace

TransferMatrix transfer_matrix(const QuotientNetwork& net, const OneForm& omega) {
  TransferMatrix t;
  t.mat = assemble(net, omega).cast<std::complex<double>>();
  return t;
}

LeadEigen lead_eigenvalue(const QuotientNetwork& net, const OneForm& omega) {
  const auto s = spectrum(net, omega, true);
  const int n = static_cast<int>(s.eigenvalues.size());
  LeadEigen out;
  out.lambda = static_cast<double>(s.eigenvalues[n - 1]);
  out.spectral_radius = static_cast<double>(
      std::max(std::abs(s.eigenvalues[0]), std::abs(s.eigenvalues[n - 1])));
  out.gap = n > 1 ? static_cast<double>(s.eigenvalues[n - 1] - s.eigenvalues[n - 2]) : 0.0;
  if (!(out.lambda > 0.0))
    throw NonPositiveLeadEigenvalue("leading eigenvalue is not positive; beta undefined");
  out.beta = std::log(out.lambda);

  // Normalize the Perron vector by <f, 1>_pi = 1.
  Eigen::Matrix<std::complex<LD>, Eigen::Dynamic, 1> f = s.eigenvectors.col(n - 1);
  std::complex<LD> ip(0.0L, 0.0L);
  for (int x = 0; x < n; ++x) ip += f[x] * static_cast<LD>(net.pi[static_cast<std::size_t>(x)]);
  if (std::abs(ip) > 1e-12L) f /= ip;
  out.eigenvector.resize(n);
  for (int x = 0; x < n; ++x)
    out.eigenvector[x] = std::complex<double>(static_cast<double>(f[x].real()),
                                              static_cast<double>(f[x].imag()));
  return out;
}

double beta_at(const QuotientNetwork& net, const Eigen::VectorXd& v) {
  return static_cast<double>(beta_ld(net, v));
}

HessianReport hessian_check(const QuotientNetwork& net, const Covariance& sigma, double h,
                            double tol) {
  const int m = net.group->rank();

  auto compute = [&net, m](double step) {
    Eigen::MatrixXd hess(m, m);
    auto axis = [m](int k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      v[k] = 1.0;
      return v;
    };
    const LD beta0 = beta_ld(net, Eigen::VectorXd::Zero(m));
    for (int k = 0; k < m; ++k) {
      const LD bp = beta_ld(net, step * axis(k));
      const LD bm = beta_ld(net, -step * axis(k));
      hess(k, k) = static_cast<double>((bp - 2.0L * beta0 + bm) / (static_cast<LD>(step) * step));
      for (int l = k + 1; l < m; ++l) {
        const LD bpp = beta_ld(net, step * (axis(k) + axis(l)));
        const LD bpm = beta_ld(net, step * (axis(k) - axis(l)));
        const LD bmp = beta_ld(net, step * (axis(l) - axis(k)));
        const LD bmm = beta_ld(net, -step * (axis(k) + axis(l)));
        hess(k, l) = hess(l, k) = static_cast<double>(
            (bpp - bpm - bmp + bmm) / (4.0L * static_cast<LD>(step) * step));
      }
    }
    return hess;
  };

  HessianReport rep;
  rep.step = h;
  rep.target = -4.0 * std::numbers::pi * std::numbers::pi * sigma.mat;
  const double scale = rep.target.cwiseAbs().maxCoeff();

  auto rel_err = [&](const Eigen::MatrixXd& hess) {
    return (hess - rep.target).cwiseAbs().maxCoeff() / scale;
  };

  rep.hessian = compute(h);
  rep.max_rel_error = rel_err(rep.hessian);
  if (rep.max_rel_error > tol) {
    // Richardson extrapolation from a larger step.
    const double H = 10.0 * h;
    const Eigen::MatrixXd big = compute(H);
    const Eigen::MatrixXd half = compute(H / 2.0);
    rep.hessian = (4.0 * half - big) / 3.0;
    rep.step = H;
    rep.max_rel_error = rel_err(rep.hessian);
  }

  // First and third directional derivatives along the axes and two mixed
  // directions; all odd derivatives of beta vanish at 0.
  std::vector<Eigen::VectorXd> dirs;
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v[k] = 1.0;
    dirs.push_back(v);
  }
  if (m > 1) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
    dirs.push_back(v);
    v[0] = -v[0];
    dirs.push_back(v);
  }
  for (const auto& u : dirs) {
    const LD b1 = beta_ld(net, h * u);
    const LD bm1 = beta_ld(net, -h * u);
    const LD b2 = beta_ld(net, 2.0 * h * u);
    const LD bm2 = beta_ld(net, -2.0 * h * u);
    const double d1 = static_cast<double>((b1 - bm1) / (2.0L * static_cast<LD>(h)));
    const double d3 = static_cast<double>((b2 - 2.0L * b1 + 2.0L * bm1 - bm2) /
                                          (2.0L * static_cast<LD>(h) * h * h));
    rep.max_first_derivative = std::max(rep.max_first_derivative, std::abs(d1));
    rep.max_third_derivative = std::max(rep.max_third_derivative, std::abs(d3));
  }

  if (rep.max_rel_error > tol)
    throw HessianMismatch("finite-difference Hessian deviates from -4 pi^2 Sigma by relative " +
                          std::to_string(rep.max_rel_error));
  return rep;
}

Eigen::MatrixXd dual_basis(const Group& group) {
  return group.basis().inverse().transpose();
}

ScanResult spectral_scan(const QuotientNetwork& net, const SpectralScanConfig& cfg) {
  if (!(cfg.delta > 0.0) || cfg.delta >= 0.5)
    throw TransferError("scan delta must lie in (0, 1/2)");
  if (cfg.grid < 8) throw TransferError("scan grid must be at least 8 points per axis");
  const int m = net.group->rank();
  if (std::pow(static_cast<double>(cfg.grid), m) > 2e6)
    throw TransferError("scan grid too large for this rank; reduce grid");
  if (cfg.enforce_lazy && !(net.mu.weight(net.group->identity()) > 0.0))
    throw TransferError("spectral_scan requires mu(id) > 0 (aperiodicity hypothesis)");

  const Eigen::MatrixXd dual = dual_basis(*net.group);
  ScanResult result;
  result.max_radius = -1.0;

  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  const int total = static_cast<int>(std::pow(static_cast<double>(cfg.grid), m));
  for (int step = 0; step < total; ++step) {
    int rem = step;
    bool inside_delta = true;
    Eigen::VectorXd r(m);
    for (int k = 0; k < m; ++k) {
      const int j = rem % cfg.grid;
      rem /= cfg.grid;
      r[k] = -0.5 + static_cast<double>(j) / cfg.grid;
      if (std::abs(r[k]) >= cfg.delta) inside_delta = false;
    }
    if (inside_delta) continue;  // open box D_delta is excluded
    const Eigen::VectorXd v = dual * r;
    Eigen::VectorXd omega(net.num_edges());
    for (int e = 0; e < net.num_edges(); ++e)
      omega[e] = v.dot(net.edges[static_cast<std::size_t>(e)].disp);
    const auto s = spectrum(net, omega, false);
    const double radius = static_cast<double>(std::max(
        std::abs(s.eigenvalues[0]), std::abs(s.eigenvalues[s.eigenvalues.size() - 1])));
    if (cfg.keep_points) result.points.push_back({v, radius});
    if (radius > result.max_radius) {
      result.max_radius = radius;
      result.argmax_v = v;
    }
  }
  if (result.max_radius < 0.0) throw TransferError("scan grid left no points outside D_delta");
  result.c_delta = -std::log(result.max_radius);
  if (result.max_radius >= 1.0 - 1e-12)
    throw GapViolation("spectral radius reaches 1 on D \\ D_delta; walk is not aperiodic");
  return result;
}

std::complex<double> char_function(const Group& group, const Measure& mu_n,
                                   const Eigen::VectorXd& v) {
  long double re = 0.0L, im = 0.0L;
  for (const auto& [x, w] : mu_n.atoms) {
    const long double phase = kTwoPi * static_cast<long double>(v.dot(group.embed(x)));
    re += static_cast<long double>(w) * std::cos(phase);
    im += static_cast<long double>(w) * std::sin(phase);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

std::complex<double> transfer_char(const QuotientNetwork& net, const Eigen::VectorXd& v, int n) {
  Eigen::VectorXd omega(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e)
    omega[e] = v.dot(net.edges[static_cast<std::size_t>(e)].disp);
  const MatrixXcld mat = assemble(net, omega);
  Eigen::Matrix<std::complex<LD>, Eigen::Dynamic, 1> f =
      Eigen::Matrix<std::complex<LD>, Eigen::Dynamic, 1>::Ones(net.num_vertices());
  for (int i = 0; i < n; ++i) f = mat * f;
  const auto val = f[net.basepoint];
  return {static_cast<double>(val.real()), static_cast<double>(val.imag())};
}

std::string scan_to_csv(const ScanResult& result, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("spectral scan");
  if (result.points.empty()) {
    os << "max_radius,c_delta\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", result.max_radius);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", result.c_delta);
    os << buf << '\n';
    return os.str();
  }
  const int m = static_cast<int>(result.points.front().v.size());
  for (int k = 0; k < m; ++k) os << 'v' << k << ',';
  os << "radius,gap\n";
  char buf[64];
  for (const auto& pt : result.points) {
    for (int k = 0; k < m; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", pt.v[k]);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", pt.radius);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", -std::log(pt.radius));
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace wrw
