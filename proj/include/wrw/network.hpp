#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrw/measure.hpp"

namespace wrw {

struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotIrreducible : NetworkError {
  using NetworkError::NetworkError;
};
struct AsymmetricMeasure : NetworkError {
  using NetworkError::NetworkError;
};

// One orientation of an edge of G = Lambda \ Cay(Gamma, supp mu). Vertices are
// the W-classes (Weyl indices); parallel edges stay distinct, labeled by the
// atom of mu that induces them.
struct NetEdge {
  int origin = 0;
  int target = 0;
  int atom = 0;      // index into the defining measure's atom list
  int reverse = 0;   // index of the reversed edge; id-loops are self-reverse
  double p = 0.0;    // transition probability mu(s)
  double c = 0.0;    // conductance pi(origin) p(e)
  Eigen::VectorXd disp;  // Phi_e
};

struct QuotientNetwork {
  const Group* group = nullptr;
  Measure mu;                        // defining step measure
  std::vector<GroupElement> lifts;   // minimal-word-norm representative per vertex
  std::vector<double> pi;            // stationary weights (uniform 1/|W|)
  std::vector<NetEdge> edges;
  std::vector<std::vector<int>> out_edges;  // E_x
  int basepoint = 0;                 // vertex of the identity coset

  int num_vertices() const { return static_cast<int>(pi.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  bool self_reverse(int e) const { return edges[static_cast<std::size_t>(e)].reverse == e; }
  std::string edge_label(int e) const;
};

// Builds the pointed finite network (G, c, x0). Requires supp mu symmetric and
// generating; throws AsymmetricMeasure / NotIrreducible otherwise.
QuotientNetwork build_network(const Group& group, const Measure& mu);

struct ReversibilityReport {
  double max_violation = 0.0;
  int argmax_edge = -1;
};

// Max |pi(oe) p(e) - pi(te) p(reverse e)| over all edges.
ReversibilityReport check_reversibility(const QuotientNetwork& net);

std::string network_to_csv(const QuotientNetwork& net, bool timestamp_header);

}  // namespace wrw
