#include "wrw/network.hpp"

#include "wrw/util.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace wrw {

namespace {

// BFS over the group generators; first visit of a Weyl class gives the
// minimal-word-norm lift.
std::vector<GroupElement> coset_lifts(const Group& g) {
  std::vector<GroupElement> lifts(g.weyl_order());
  std::vector<bool> seen(g.weyl_order(), false);
  std::vector<GroupElement> queue{g.identity()};
  std::unordered_set<GroupElement, ElemHash> visited{g.identity()};
  seen[static_cast<std::size_t>(g.identity().w)] = true;
  lifts[static_cast<std::size_t>(g.identity().w)] = g.identity();
  std::size_t found = 1, head = 0;
  while (head < queue.size() && found < g.weyl_order()) {
    const GroupElement cur = queue[head++];
    for (const auto& s : g.generator_elements()) {
      if (g.is_identity(s)) continue;
      GroupElement nxt = g.multiply(cur, s);
      if (!visited.insert(nxt).second) continue;
      queue.push_back(nxt);
      if (!seen[nxt.w]) {
        seen[nxt.w] = true;
        lifts[nxt.w] = nxt;
        ++found;
      }
    }
  }
  if (found < g.weyl_order())
    throw NotIrreducible("group generators do not reach every Weyl class");
  return lifts;
}

// The support must generate Gamma: close supp mu under multiplication until
// every group generator appears (or a radius cap trips).
void check_generating(const Group& g, const Measure& mu) {
  constexpr int kRadiusCap = 64;
  std::unordered_set<GroupElement, ElemHash> targets;
  for (const auto& s : g.generator_elements())
    if (!g.is_identity(s)) targets.insert(s);
  std::unordered_set<GroupElement, ElemHash> visited{g.identity()};
  std::vector<GroupElement> frontier{g.identity()};
  targets.erase(g.identity());
  for (int r = 0; r < kRadiusCap && !targets.empty() && !frontier.empty(); ++r) {
    std::vector<GroupElement> next;
    for (const auto& cur : frontier)
      for (const auto& [s, w] : mu.atoms) {
        GroupElement nxt = g.multiply(cur, s);
        if (!visited.insert(nxt).second) continue;
        next.push_back(nxt);
        targets.erase(nxt);
      }
    frontier = std::move(next);
  }
  if (!targets.empty())
    throw NotIrreducible("supp mu does not generate the group (missing generators within the search radius)");
}

}  // namespace

QuotientNetwork build_network(const Group& group, const Measure& mu) {
  if (mu.group != &group) throw GroupMismatch("build_network: measure lives on a different group");
  if (mu.atoms.empty()) throw NetworkError("build_network: empty measure");

  for (const auto& [s, w] : mu.atoms) {
    const double wi = mu.weight(group.inverse(s));
    if (wi != w)
      throw AsymmetricMeasure("mu(s) != mu(s^-1) for atom " + group.describe(s));
  }
  check_generating(group, mu);

  QuotientNetwork net;
  net.group = &group;
  net.mu = mu;
  net.lifts = coset_lifts(group);
  const int nv = static_cast<int>(group.weyl_order());
  net.pi.assign(static_cast<std::size_t>(nv), 1.0 / nv);
  net.basepoint = group.weyl_identity_index();
  net.out_edges.assign(static_cast<std::size_t>(nv), {});

  // Locates the atom index of an element (atom lists are sorted).
  auto atom_index = [&mu](const GroupElement& e) -> int {
    auto it = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), e,
                               [](const auto& p, const GroupElement& g) { return p.first < g; });
    if (it == mu.atoms.end() || !(it->first == e)) return -1;
    return static_cast<int>(it - mu.atoms.begin());
  };

  for (int v = 0; v < nv; ++v) {
    const GroupElement& lift = net.lifts[static_cast<std::size_t>(v)];
    const Eigen::VectorXd phi_lift = group.embed(lift);
    for (std::size_t ai = 0; ai < mu.atoms.size(); ++ai) {
      const auto& [s, w] = mu.atoms[ai];
      NetEdge e;
      e.origin = v;
      e.atom = static_cast<int>(ai);
      e.p = w;
      e.c = net.pi[static_cast<std::size_t>(v)] * w;
      if (group.is_identity(s)) {
        e.target = v;
        e.disp = Eigen::VectorXd::Zero(group.rank());
      } else {
        const GroupElement moved = group.multiply(lift, s);
        e.target = group.weyl_mult(v, s.w);
        e.disp = group.embed(moved) - phi_lift;
      }
      const int idx = static_cast<int>(net.edges.size());
      net.out_edges[static_cast<std::size_t>(v)].push_back(idx);
      net.edges.push_back(std::move(e));
    }
  }

  // Pair every edge with its reverse: (v, s) reverses to (target, s^-1).
  std::unordered_map<long long, int> slot;  // (vertex, atom) -> edge index
  auto key = [&mu](int v, int atom) {
    return static_cast<long long>(v) * static_cast<long long>(mu.atoms.size()) + atom;
  };
  for (std::size_t i = 0; i < net.edges.size(); ++i)
    slot[key(net.edges[i].origin, net.edges[i].atom)] = static_cast<int>(i);
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    NetEdge& e = net.edges[i];
    const GroupElement inv = group.inverse(mu.atoms[static_cast<std::size_t>(e.atom)].first);
    const int inv_atom = atom_index(inv);
    if (inv_atom < 0) throw AsymmetricMeasure("missing inverse atom for " + net.edge_label(static_cast<int>(i)));
    e.reverse = slot.at(key(e.target, inv_atom));
  }

  // Reversibility pi(x) p(x, x.s) = pi(x.s) p(x.s, x); exact here since pi is
  // uniform and mu passed the symmetry gate.
  const auto rep = check_reversibility(net);
  if (rep.max_violation > 1e-15)
    throw NetworkError("reversibility violated on construction: " + std::to_string(rep.max_violation));
  return net;
}

ReversibilityReport check_reversibility(const QuotientNetwork& net) {
  ReversibilityReport rep;
  for (int i = 0; i < net.num_edges(); ++i) {
    const NetEdge& e = net.edges[static_cast<std::size_t>(i)];
    const NetEdge& r = net.edges[static_cast<std::size_t>(e.reverse)];
    const double v = std::abs(net.pi[static_cast<std::size_t>(e.origin)] * e.p -
                              net.pi[static_cast<std::size_t>(e.target)] * r.p);
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.argmax_edge = i;
    }
  }
  return rep;
}

std::string QuotientNetwork::edge_label(int e) const {
  const auto& atom = mu.atoms[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].atom)].first;
  for (std::size_t i = 0; i < group->generator_elements().size(); ++i)
    if (group->generator_elements()[i] == atom) return group->generator_names()[i];
  if (group->is_identity(atom)) return "id";
  return group->describe(atom);
}

std::string network_to_csv(const QuotientNetwork& net, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("network dump");
  os << "origin,terminus,generator,p,c";
  for (int i = 0; i < net.group->rank(); ++i) os << ",phi" << i;
  os << '\n';
  char buf[64];
  for (int i = 0; i < net.num_edges(); ++i) {
    const NetEdge& e = net.edges[static_cast<std::size_t>(i)];
    os << e.origin << ',' << e.target << ",\"" << net.edge_label(i) << "\"";
    std::snprintf(buf, sizeof buf, "%.17g", e.p);
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", e.c);
    os << ',' << buf;
    for (int k = 0; k < net.group->rank(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", e.disp[k]);
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wrw
