#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "wrw/network.hpp"

using namespace wrw;

namespace {

GroupElement gen(const Group& g, const std::string& name) {
  for (std::size_t i = 0; i < g.generator_names().size(); ++i)
    if (g.generator_names()[i] == name) return g.generator_elements()[i];
  throw std::runtime_error("no generator named " + name);
}

}  // namespace

TEST_CASE("A1 quotient network layout") {
  Group g = Group::builtin("A1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  QuotientNetwork net = build_network(g, mu);
  CHECK(net.num_vertices() == 2);
  CHECK(net.num_edges() == 6);  // |W| * |supp mu|

  int loops = 0, cross = 0;
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    CHECK(ed.p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(ed.c == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    if (ed.origin == ed.target) {
      ++loops;
      CHECK(net.self_reverse(e));
      CHECK(ed.disp.norm() == 0.0);
    } else {
      ++cross;
      CHECK(std::abs(ed.disp[0]) == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(net.edges[static_cast<std::size_t>(ed.reverse)].disp[0] ==
            doctest::Approx(-ed.disp[0]).epsilon(1e-15));
    }
  }
  CHECK(loops == 2);
  CHECK(cross == 4);
}

TEST_CASE("A1xA1 network from the noised pair matches the quotient graph") {
  Group g = Group::builtin("A1");
  Group gp = Group::builtin("A1xA1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  Measure pi = noised_pair(mu, 0.5, gp);
  QuotientNetwork net = build_network(gp, pi);
  CHECK(net.num_vertices() == 4);
  CHECK(net.num_edges() == 4 * 9);
  // Each vertex carries one loop (the (id,id) atom) and eight outgoing edges.
  for (int v = 0; v < 4; ++v) {
    int loops = 0;
    CHECK(net.out_edges[static_cast<std::size_t>(v)].size() == 9);
    for (int e : net.out_edges[static_cast<std::size_t>(v)])
      if (net.edges[static_cast<std::size_t>(e)].origin == net.edges[static_cast<std::size_t>(e)].target) ++loops;
    CHECK(loops == 1);
  }
  // Edge displacement multiset per vertex: 4 moves of (+-1/2, +-1/2), two of
  // (+-1/2, 0), two of (0, +-1/2), matching the product graph geometry.
  std::map<std::pair<int, int>, int> counts;
  for (int e : net.out_edges[0]) {
    const auto& d = net.edges[static_cast<std::size_t>(e)].disp;
    counts[{static_cast<int>(std::lround(2 * d[0])), static_cast<int>(std::lround(2 * d[1]))}]++;
  }
  CHECK(counts[{0, 0}] == 1);
  int diag = 0, horiz = 0, vert = 0;
  for (const auto& [k, n] : counts) {
    if (std::abs(k.first) == 1 && std::abs(k.second) == 1) diag += n;
    if (std::abs(k.first) == 1 && k.second == 0) horiz += n;
    if (k.first == 0 && std::abs(k.second) == 1) vert += n;
  }
  CHECK(diag == 4);
  CHECK(horiz == 2);
  CHECK(vert == 2);
}

TEST_CASE("reversibility holds for built-ins and non-uniform weights") {
  Group g = Group::builtin("A1");
  for (double lazy : {0.2, 1.0 / 3.0, 0.9}) {
    QuotientNetwork net = build_network(g, lazy_uniform(g, lazy));
    CHECK(check_reversibility(net).max_violation == 0.0);
  }
  Measure nu = measure_from_atoms<double>(g, {{g.identity(), 0.2},
                                              {gen(g, "s1"), 0.5},
                                              {gen(g, "s2"), 0.3}});
  QuotientNetwork net = build_network(g, nu);
  CHECK(check_reversibility(net).max_violation == 0.0);
}

TEST_CASE("corrupted network reports a positive violation") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  for (auto& e : net.edges)
    if (e.origin != e.target) {
      e.p += 0.05;  // break one direction only
      break;
    }
  CHECK(check_reversibility(net).max_violation > 1e-3);
}

TEST_CASE("displacements are invariant under the lift choice") {
  for (const char* name : {"A2", "C2"}) {
    Group g = Group::builtin(name);
    Measure mu = lazy_uniform(g, 0.25);
    QuotientNetwork net = build_network(g, mu);
    for (int shift = 1; shift <= 3; ++shift) {
      GroupElement lambda = g.identity();
      lambda.t[0] = shift;
      lambda.t[1] = -2 * shift;
      for (int e = 0; e < net.num_edges(); ++e) {
        const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
        const GroupElement& s = mu.atoms[static_cast<std::size_t>(ed.atom)].first;
        const GroupElement alt = g.multiply(lambda, net.lifts[static_cast<std::size_t>(ed.origin)]);
        const Eigen::VectorXd disp2 = g.embed(g.multiply(alt, s)) - g.embed(alt);
        CHECK((disp2 - ed.disp).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("edge count law") {
  Group g = Group::builtin("C2");
  Measure mu = lazy_uniform(g, 0.4);
  QuotientNetwork net = build_network(g, mu);
  CHECK(net.num_edges() == static_cast<int>(g.weyl_order() * mu.atoms.size()));
}

TEST_CASE("conductances at each vertex sum to pi(x)") {
  for (const char* name : {"A1", "A2", "C2"}) {
    Group g = Group::builtin(name);
    QuotientNetwork net = build_network(g, lazy_uniform(g, 0.3));
    for (int x = 0; x < net.num_vertices(); ++x) {
      double sum = 0.0;
      for (int e : net.out_edges[static_cast<std::size_t>(x)])
        sum += net.edges[static_cast<std::size_t>(e)].c;
      CHECK(sum == doctest::Approx(net.pi[static_cast<std::size_t>(x)]).epsilon(1e-14));
    }
  }
}

TEST_CASE("single-generator support is not generating") {
  Group g = Group::builtin("A1");
  Measure mu = measure_from_atoms<double>(g, {{gen(g, "s1"), 1.0}});
  CHECK_THROWS_AS(build_network(g, mu), NotIrreducible);
}

TEST_CASE("asymmetric measure is rejected") {
  Group z = Group::free_abelian(1);
  GroupElement plus = z.identity(), minus = z.identity();
  plus.t[0] = 1;
  minus.t[0] = -1;
  Measure bad = measure_from_atoms<double>(z, {{z.identity(), 0.2}, {plus, 0.5}, {minus, 0.3}});
  CHECK_THROWS_AS(build_network(z, bad), AsymmetricMeasure);
}

TEST_CASE("Z quotient keeps translation loops in reverse pairs") {
  Group z = Group::free_abelian(1);
  GroupElement plus = z.identity(), minus = z.identity();
  plus.t[0] = 1;
  minus.t[0] = -1;
  Measure mu = measure_from_atoms<double>(z, {{z.identity(), 1.0 / 3}, {plus, 1.0 / 3}, {minus, 1.0 / 3}});
  QuotientNetwork net = build_network(z, mu);
  CHECK(net.num_vertices() == 1);
  CHECK(net.num_edges() == 3);
  int self_rev = 0;
  for (int e = 0; e < 3; ++e) {
    if (net.self_reverse(e)) {
      ++self_rev;
      CHECK(net.edges[static_cast<std::size_t>(e)].disp.norm() == 0.0);
    } else {
      const int r = net.edges[static_cast<std::size_t>(e)].reverse;
      CHECK(net.edges[static_cast<std::size_t>(r)].disp[0] ==
            doctest::Approx(-net.edges[static_cast<std::size_t>(e)].disp[0]));
    }
  }
  CHECK(self_rev == 1);
}

TEST_CASE("non-generating lattice support is rejected") {
  Group z = Group::free_abelian(1);
  GroupElement two = z.identity(), mtwo = z.identity();
  two.t[0] = 2;
  mtwo.t[0] = -2;
  Measure mu = measure_from_atoms<double>(z, {{z.identity(), 0.5}, {two, 0.25}, {mtwo, 0.25}});
  CHECK_THROWS_AS(build_network(z, mu), NotIrreducible);
}

TEST_CASE("product conductances marginalize to the factor network") {
  Group g = Group::builtin("A1");
  Group gp = Group::builtin("A1xA1");
  Measure mu = lazy_uniform(g, 1.0 / 3.0);
  QuotientNetwork fnet = build_network(g, mu);
  for (double rho : {0.3, 1.0}) {
    QuotientNetwork pnet = build_network(gp, noised_pair(mu, rho, gp));
    // Sum pair conductances over the second coordinate of both endpoints,
    // keying factor-1 edges by their Weyl blocks and displacement sign.
    std::map<std::tuple<int, int, int>, double> agg;
    for (const auto& e : pnet.edges) {
      const IntMat& mo = gp.weyl_matrix(e.origin);
      const IntMat& mt = gp.weyl_matrix(e.target);
      const int so = mo.at(0, 0), st = mt.at(0, 0);
      const double d1 = e.disp[0];
      const int key = d1 > 0.25 ? 1 : (d1 < -0.25 ? -1 : 0);
      agg[{so, st, key}] += e.c;
    }
    for (const auto& fe : fnet.edges) {
      const IntMat& mo = g.weyl_matrix(fe.origin);
      const IntMat& mt = g.weyl_matrix(fe.target);
      const double d = fe.disp[0];
      const int key = d > 0.25 ? 1 : (d < -0.25 ? -1 : 0);
      CHECK(agg[{mo.at(0, 0), mt.at(0, 0), key}] ==
            doctest::Approx(fe.c).epsilon(1e-12));
    }
  }
}

TEST_CASE("network csv dump is stable") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  const std::string a = network_to_csv(net, false);
  CHECK(a == network_to_csv(net, false));
  CHECK(a.find("origin,terminus,generator,p,c,phi0") == 0);
  CHECK(a.find("s1") != std::string::npos);
}
