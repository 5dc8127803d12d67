#pragma once

#include <Eigen/Dense>

#include "wrw/network.hpp"

namespace wrw {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCovariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// C^0(G, R): values per vertex. C^1(G, R): values per directed edge with
// omega(rev e) = -omega(e); self-reverse loops carry 0.
using VertexFunction = Eigen::VectorXd;
using OneForm = Eigen::VectorXd;

bool is_one_form(const QuotientNetwork& net, const OneForm& omega, double tol = 0.0);

// df(e) = f(te) - f(oe)
OneForm differential(const QuotientNetwork& net, const VertexFunction& f);

// d* omega(x) = -(1/pi(x)) sum_{e in E_x} c(e) omega(e)
VertexFunction codifferential(const QuotientNetwork& net, const OneForm& omega);

// P f(x) = (1/pi(x)) sum_{e in E_x} c(e) f(te)
VertexFunction apply_P(const QuotientNetwork& net, const VertexFunction& f);

double inner_pi(const QuotientNetwork& net, const VertexFunction& f, const VertexFunction& g);
// <w1, w2>_c = (1/2) sum_e w1(e) w2(e) c(e)
double inner_c(const QuotientNetwork& net, const OneForm& a, const OneForm& b);

// v_hat(e) = <v, Phi_e>
OneForm coordinate_form(const QuotientNetwork& net, const Eigen::VectorXd& v);

struct HarmonicParts {
  OneForm u;          // harmonic part, d* u = 0
  VertexFunction f;   // potential, mean zero under pi; u + df = omega
};

// Unique decomposition omega = u + df; solves (I - P) f = d* omega with the
// mean-zero constraint appended (the kernel of I - P is constants).
HarmonicParts harmonic_projection(const QuotientNetwork& net, const OneForm& omega);

struct Covariance {
  Eigen::MatrixXd mat;
};

// <v1, Sigma v2> = sum_{e in E(G)} u1(e) u2(e) c(e), summed over all directed
// edges exactly as the defining formula is written (no 1/2).
Covariance covariance(const QuotientNetwork& net);

// Per-coset correction h with Phi_H(x) = Phi(x) - h(coset x) making the step
// mean zero at every vertex; column k solves the projection of the k-th
// coordinate form. Returns |W| x m.
Eigen::MatrixXd harmonic_embedding(const QuotientNetwork& net);

std::string covariance_to_csv(const Covariance& sigma, bool timestamp_header);

// Per-edge dump of a 1-form (debugging aid).
std::string one_form_to_csv(const QuotientNetwork& net, const OneForm& omega,
                            bool timestamp_header);

}  // namespace wrw
