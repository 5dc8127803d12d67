#pragma once

#include <complex>

#include "wrw/hodge.hpp"

namespace wrw {

struct TransferError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveLeadEigenvalue : TransferError {
  using TransferError::TransferError;
};
struct GapViolation : TransferError {
  using TransferError::TransferError;
};
struct HessianMismatch : TransferError {
  using TransferError::TransferError;
};

// L_omega f(x) = sum_{e in E_x} p(e) e^{2 pi i omega(e)} f(te); entry (x, y)
// collects the edges x -> y. Self-adjoint for symmetric mu, so the spectrum is
// real. Internally eigenvalues are computed in long double; the public matrix
// is double precision.
struct TransferMatrix {
  Eigen::MatrixXcd mat;
};

TransferMatrix transfer_matrix(const QuotientNetwork& net, const OneForm& omega);

struct LeadEigen {
  double lambda = 0.0;           // largest eigenvalue
  double beta = 0.0;             // log lambda (only if lambda > 0)
  double spectral_radius = 0.0;  // max |eigenvalue|
  double gap = 0.0;              // lambda_1 - lambda_2, logged for the simplicity caveat
  Eigen::VectorXcd eigenvector;  // f_omega normalized by <f, 1>_pi = 1
};

LeadEigen lead_eigenvalue(const QuotientNetwork& net, const OneForm& omega);

// beta(v) := log lambda(v_hat) for an ambient direction v.
double beta_at(const QuotientNetwork& net, const Eigen::VectorXd& v);

struct HessianReport {
  Eigen::MatrixXd hessian;        // central finite differences of beta at 0
  Eigen::MatrixXd target;         // -4 pi^2 Sigma
  double max_rel_error = 0.0;     // entrywise, relative to the largest target scale
  double max_first_derivative = 0.0;
  double max_third_derivative = 0.0;
  double step = 0.0;
};

// Central differences with step h; falls back to Richardson extrapolation at
// 10x the step if the first pass misses the tolerance. Throws HessianMismatch
// when even the fallback misses.
HessianReport hessian_check(const QuotientNetwork& net, const Covariance& sigma,
                            double h = 1e-3, double tol = 1e-4);

struct SpectralScanConfig {
  double delta = 0.05;  // excluded open box D_delta in dual coordinates
  int grid = 64;        // points per axis over D
  bool enforce_lazy = true;
  bool keep_points = false;  // retain the per-point table for CSV dumps
};

struct ScanPoint {
  Eigen::VectorXd v;  // ambient dual vector
  double radius = 0.0;
};

struct ScanResult {
  double max_radius = 0.0;
  Eigen::VectorXd argmax_v;
  double c_delta = 0.0;  // -log(max_radius)
  std::vector<ScanPoint> points;
};

// Max spectral radius of L_{v_hat} over a grid on D \ D_delta; certifies the
// gap when strictly below 1. Throws GapViolation at 1 - 1e-12.
ScanResult spectral_scan(const QuotientNetwork& net, const SpectralScanConfig& cfg);

// Dual basis of the lattice: columns of B^{-T}.
Eigen::MatrixXd dual_basis(const Group& group);

// phi_{mu_n}(v) = sum_x mu_n(x) e^{2 pi i <v, Phi(x)>}.
std::complex<double> char_function(const Group& group, const Measure& mu_n,
                                   const Eigen::VectorXd& v);

// (L_{v_hat}^n 1)(x0) by repeated application.
std::complex<double> transfer_char(const QuotientNetwork& net, const Eigen::VectorXd& v, int n);

std::string scan_to_csv(const ScanResult& result, bool timestamp_header);

}  // namespace wrw
