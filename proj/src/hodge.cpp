#include "wrw/hodge.hpp"

#include "wrw/util.hpp"

#include <cstdio>
#include <sstream>

namespace wrw {

bool is_one_form(const QuotientNetwork& net, const OneForm& omega, double tol) {
  if (omega.size() != net.num_edges()) return false;
  for (int e = 0; e < net.num_edges(); ++e) {
    const int r = net.edges[static_cast<std::size_t>(e)].reverse;
    if (r == e) {
      if (std::abs(omega[e]) > tol) return false;
    } else if (std::abs(omega[e] + omega[r]) > tol) {
      return false;
    }
  }
  return true;
}

OneForm differential(const QuotientNetwork& net, const VertexFunction& f) {
  OneForm df(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    df[e] = f[ed.target] - f[ed.origin];
  }
  return df;
}

VertexFunction codifferential(const QuotientNetwork& net, const OneForm& omega) {
  VertexFunction out = VertexFunction::Zero(net.num_vertices());
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    out[ed.origin] -= ed.c * omega[e];
  }
  for (int x = 0; x < net.num_vertices(); ++x) out[x] /= net.pi[static_cast<std::size_t>(x)];
  return out;
}

VertexFunction apply_P(const QuotientNetwork& net, const VertexFunction& f) {
  VertexFunction out = VertexFunction::Zero(net.num_vertices());
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    out[ed.origin] += ed.c * f[ed.target];
  }
  for (int x = 0; x < net.num_vertices(); ++x) out[x] /= net.pi[static_cast<std::size_t>(x)];
  return out;
}

double inner_pi(const QuotientNetwork& net, const VertexFunction& f, const VertexFunction& g) {
  double s = 0.0;
  for (int x = 0; x < net.num_vertices(); ++x) s += f[x] * g[x] * net.pi[static_cast<std::size_t>(x)];
  return s;
}

double inner_c(const QuotientNetwork& net, const OneForm& a, const OneForm& b) {
  double s = 0.0;
  for (int e = 0; e < net.num_edges(); ++e) s += a[e] * b[e] * net.edges[static_cast<std::size_t>(e)].c;
  return 0.5 * s;
}

OneForm coordinate_form(const QuotientNetwork& net, const Eigen::VectorXd& v) {
  OneForm omega(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e) omega[e] = v.dot(net.edges[static_cast<std::size_t>(e)].disp);
  return omega;
}

HarmonicParts harmonic_projection(const QuotientNetwork& net, const OneForm& omega) {
  const int n = net.num_vertices();
  Eigen::MatrixXd p_mat = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    p_mat(ed.origin, ed.target) += ed.c / net.pi[static_cast<std::size_t>(ed.origin)];
  }

  const VertexFunction rhs = codifferential(net, omega);
  Eigen::MatrixXd sys(n + 1, n);
  sys.topRows(n) = Eigen::MatrixXd::Identity(n, n) - p_mat;
  for (int x = 0; x < n; ++x) sys(n, x) = net.pi[static_cast<std::size_t>(x)];
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs;
  b[n] = 0.0;

  HarmonicParts parts;
  parts.f = sys.colPivHouseholderQr().solve(b);
  parts.u = omega - differential(net, parts.f);

  const double residual = codifferential(net, parts.u).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw SolverFailure("harmonic projection residual " + std::to_string(residual) +
                        "; network may be disconnected");
  return parts;
}

Covariance covariance(const QuotientNetwork& net) {
  const int m = net.group->rank();
  std::vector<OneForm> harmonic;
  harmonic.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v[k] = 1.0;
    harmonic.push_back(harmonic_projection(net, coordinate_form(net, v)).u);
  }

  Covariance sigma;
  sigma.mat = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) {
      double s = 0.0;
      for (int e = 0; e < net.num_edges(); ++e)
        s += harmonic[static_cast<std::size_t>(k)][e] * harmonic[static_cast<std::size_t>(l)][e] *
             net.edges[static_cast<std::size_t>(e)].c;
      sigma.mat(k, l) = s;
      sigma.mat(l, k) = s;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.mat);
  if (es.eigenvalues().minCoeff() <= 1e-14)
    throw DegenerateCovariance("covariance eigenvalue <= 1e-14; support is not generating");
  return sigma;
}

Eigen::MatrixXd harmonic_embedding(const QuotientNetwork& net) {
  const int m = net.group->rank();
  const int n = net.num_vertices();
  Eigen::MatrixXd h(n, m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v[k] = 1.0;
    h.col(k) = harmonic_projection(net, coordinate_form(net, v)).f;
  }
  // Normalize so Phi_H(id) = 0; constant shifts preserve the step condition.
  h.rowwise() -= h.row(net.basepoint);

  // Mean-zero step condition: sum_s (Phi_H(xs) - Phi_H(x)) mu(s) = 0 at every
  // vertex, where Phi_H(x) = Phi(x) - h(coset x).
  for (int x = 0; x < n; ++x) {
    Eigen::VectorXd drift = Eigen::VectorXd::Zero(m);
    for (int e : net.out_edges[static_cast<std::size_t>(x)]) {
      const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
      drift += ed.p * (ed.disp - (h.row(ed.target) - h.row(ed.origin)).transpose());
    }
    if (drift.cwiseAbs().maxCoeff() > 1e-10)
      throw SolverFailure("harmonic embedding drift residual too large");
  }
  return h;
}

std::string one_form_to_csv(const QuotientNetwork& net, const OneForm& omega,
                            bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("one-form dump");
  os << "edge,origin,terminus,generator,value\n";
  char buf[64];
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    std::snprintf(buf, sizeof buf, "%.17g", omega[e]);
    os << e << ',' << ed.origin << ',' << ed.target << ",\"" << net.edge_label(e) << "\","
       << buf << '\n';
  }
  return os.str();
}

std::string covariance_to_csv(const Covariance& sigma, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("covariance dump");
  char buf[64];
  for (int i = 0; i < sigma.mat.rows(); ++i) {
    for (int j = 0; j < sigma.mat.cols(); ++j) {
      if (j) os << ',';
      std::snprintf(buf, sizeof buf, "%.17g", sigma.mat(i, j));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wrw
