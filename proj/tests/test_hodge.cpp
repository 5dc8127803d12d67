#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "wrw/hodge.hpp"
#include "wrw/util.hpp"

using namespace wrw;

namespace {

GroupElement gen(const Group& g, const std::string& name) {
  for (std::size_t i = 0; i < g.generator_names().size(); ++i)
    if (g.generator_names()[i] == name) return g.generator_elements()[i];
  throw std::runtime_error("no generator named " + name);
}

OneForm random_one_form(const QuotientNetwork& net, std::mt19937_64& rng) {
  OneForm w = OneForm::Zero(net.num_edges());
  for (int e = 0; e < net.num_edges(); ++e) {
    const int r = net.edges[static_cast<std::size_t>(e)].reverse;
    if (r == e || r < e) continue;
    const double v = u01_from_bits(rng()) * 2.0 - 1.0;
    w[e] = v;
    w[r] = -v;
  }
  return w;
}

VertexFunction random_vertex_function(const QuotientNetwork& net, std::mt19937_64& rng) {
  VertexFunction f(net.num_vertices());
  for (int x = 0; x < net.num_vertices(); ++x) f[x] = u01_from_bits(rng()) * 2.0 - 1.0;
  return f;
}

}  // namespace

TEST_CASE("differential basics") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));

  VertexFunction c = VertexFunction::Constant(net.num_vertices(), 7.0);
  CHECK(differential(net, c).cwiseAbs().maxCoeff() == 0.0);

  VertexFunction f = VertexFunction::Zero(2);
  f[net.basepoint] = 0.0;
  f[1 - net.basepoint] = 1.0;
  OneForm df = differential(net, f);
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    if (ed.origin == ed.target) CHECK(df[e] == 0.0);
    else if (ed.origin == net.basepoint) CHECK(df[e] == 1.0);
    else CHECK(df[e] == -1.0);
  }

  std::mt19937_64 rng(5);
  VertexFunction a = random_vertex_function(net, rng), b = random_vertex_function(net, rng);
  OneForm lin = differential(net, 2.0 * a + 3.0 * b);
  CHECK((lin - 2.0 * differential(net, a) - 3.0 * differential(net, b)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("codifferential, adjointness, and d*d = I - P") {
  for (const char* name : {"A1", "A2", "C2"}) {
    Group g = Group::builtin(name);
    QuotientNetwork net = build_network(g, lazy_uniform(g, 0.3));
    std::mt19937_64 rng(11);

    CHECK(codifferential(net, OneForm::Zero(net.num_edges())).cwiseAbs().maxCoeff() == 0.0);

    for (int trial = 0; trial < 4; ++trial) {
      VertexFunction f = random_vertex_function(net, rng);
      OneForm w = random_one_form(net, rng);
      CHECK(inner_c(net, differential(net, f), w) ==
            doctest::Approx(inner_pi(net, f, codifferential(net, w))).epsilon(1e-12));
      VertexFunction lhs = codifferential(net, differential(net, f));
      VertexFunction rhs = f - apply_P(net, f);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("coordinate form on the uniform A1 walk is already harmonic") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  Eigen::VectorXd v(1);
  v << 1.0;
  OneForm vhat = coordinate_form(net, v);
  CHECK(codifferential(net, vhat).cwiseAbs().maxCoeff() < 1e-15);
  auto [u, f] = harmonic_projection(net, vhat);
  CHECK((u - vhat).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(f.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exact forms project to zero") {
  Group g = Group::builtin("A2");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 0.25));
  std::mt19937_64 rng(17);
  VertexFunction gfun = random_vertex_function(net, rng);
  auto [u, f] = harmonic_projection(net, differential(net, gfun));
  CHECK(u.cwiseAbs().maxCoeff() < 1e-12);
  const double mean = inner_pi(net, gfun, VertexFunction::Ones(net.num_vertices()));
  CHECK((f - (gfun.array() - mean).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("harmonic projection: orthogonality, idempotence, antisymmetry") {
  Group g = Group::builtin("C2");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 0.3));
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    OneForm w = random_one_form(net, rng);
    auto [u, f] = harmonic_projection(net, w);
    CHECK(is_one_form(net, u, 1e-12));
    CHECK((u + differential(net, f) - w).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(inner_c(net, u, differential(net, f))) < 1e-12);
    auto [u2, f2] = harmonic_projection(net, u);
    CHECK((u2 - u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f2.cwiseAbs().maxCoeff() < 1e-12);
    // f is mean zero under pi.
    CHECK(std::abs(inner_pi(net, f, VertexFunction::Ones(net.num_vertices()))) < 1e-14);
  }
}

TEST_CASE("A1 harmonic correction reproduces the two-coset pattern") {
  Group g = Group::builtin("A1");
  const double p = 0.5, q = 0.3;
  Measure mu = measure_from_atoms<double>(g, {{g.identity(), 1.0 - p - q},
                                              {gen(g, "s1"), p},
                                              {gen(g, "s2"), q}});
  QuotientNetwork net = build_network(g, mu);
  Eigen::VectorXd v(1);
  v << 1.0;
  auto [u, f] = harmonic_projection(net, coordinate_form(net, v));
  const int id_class = g.weyl_identity_index();
  const int s_class = 1 - id_class;
  // Up to the mean-zero shift, f carries p/(2(p+q)) on the identity coset and
  // q/(2(p+q)) on the reflected one.
  CHECK(f[id_class] == doctest::Approx(p / (2 * (p + q)) - 0.25).epsilon(1e-12));
  CHECK(f[s_class] == doctest::Approx(q / (2 * (p + q)) - 0.25).epsilon(1e-12));
  // Harmonic part: u = 2 disp * q/(p+q) on s1-edges, 2 disp * p/(p+q) on
  // s2-edges, zero on loops.
  for (int e = 0; e < net.num_edges(); ++e) {
    const NetEdge& ed = net.edges[static_cast<std::size_t>(e)];
    if (ed.origin == ed.target) {
      CHECK(u[e] == 0.0);
      continue;
    }
    const bool is_s1 = net.mu.atoms[static_cast<std::size_t>(ed.atom)].first == gen(g, "s1");
    const double expect = 2.0 * ed.disp[0] * (is_s1 ? q : p) / (p + q);
    CHECK(u[e] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("A1 covariance: mu(s1) mu(s2) / (1 - mu(id))") {
  Group g = Group::builtin("A1");
  for (auto [p, q] : std::vector<std::pair<double, double>>{{0.3, 0.3}, {0.5, 0.3}, {0.15, 0.45}}) {
    Measure mu = measure_from_atoms<double>(g, {{g.identity(), 1.0 - p - q},
                                                {gen(g, "s1"), p},
                                                {gen(g, "s2"), q}});
    Covariance sigma = covariance(build_network(g, mu));
    CHECK(sigma.mat(0, 0) == doctest::Approx(p * q / (p + q)).epsilon(1e-12));
  }
}

TEST_CASE("pair covariance reproduces the closed-form A1xA1 values") {
  Group g = Group::builtin("A1");
  Group gp = Group::builtin("A1xA1");
  for (double a : {0.2, 1.0 / 3.0, 0.6}) {
    Measure mu = lazy_uniform(g, a);
    for (double rho : {0.5, 1.0}) {
      Covariance sigma = covariance(build_network(gp, noised_pair(mu, rho, gp)));
      const double want = (1.0 - a) / 4.0;
      CHECK(std::abs(sigma.mat(0, 0) - want) < 1e-10);
      CHECK(std::abs(sigma.mat(1, 1) - want) < 1e-10);
      CHECK(std::abs(sigma.mat(0, 1)) < 1e-10);
    }
  }
}

TEST_CASE("A2 and C2 covariance constants") {
  for (double a : {0.2, 1.0 / 3.0, 0.6}) {
    Group a2 = Group::builtin("A2");
    Covariance s2 = covariance(build_network(a2, lazy_uniform(a2, a)));
    const double want2 = std::sqrt(3.0) / 27.0 * (1.0 - a);
    CHECK(std::abs(s2.mat(0, 0) - want2) < 1e-10);
    CHECK(std::abs(s2.mat(1, 1) - want2) < 1e-10);
    CHECK(std::abs(s2.mat(0, 1)) < 1e-10);

    Group c2 = Group::builtin("C2");
    Covariance sc = covariance(build_network(c2, lazy_uniform(c2, a)));
    const double wantc = (1.0 - a) / 24.0;
    CHECK(std::abs(sc.mat(0, 0) - wantc) < 1e-10);
    CHECK(std::abs(sc.mat(1, 1) - wantc) < 1e-10);
    CHECK(std::abs(sc.mat(0, 1)) < 1e-10);
  }
}

TEST_CASE("Z covariance equals the step variance") {
  Group z = Group::free_abelian(1);
  GroupElement plus = z.identity(), minus = z.identity();
  plus.t[0] = 1;
  minus.t[0] = -1;
  const double lazy = 0.4;
  Measure mu = measure_from_atoms<double>(
      z, {{z.identity(), lazy}, {plus, (1 - lazy) / 2}, {minus, (1 - lazy) / 2}});
  Covariance sigma = covariance(build_network(z, mu));
  CHECK(sigma.mat(0, 0) == doctest::Approx(1.0 - lazy).epsilon(1e-14));
}

TEST_CASE("gauge invariance: adding an exact form leaves the harmonic part fixed") {
  Group g = Group::builtin("A2");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 0.25));
  std::mt19937_64 rng(31);
  Eigen::VectorXd v(2);
  v << 0.7, -0.4;
  OneForm vhat = coordinate_form(net, v);
  OneForm u0 = harmonic_projection(net, vhat).u;
  for (int trial = 0; trial < 3; ++trial) {
    OneForm shifted = vhat + differential(net, random_vertex_function(net, rng));
    OneForm u1 = harmonic_projection(net, shifted).u;
    CHECK((u1 - u0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("period identity along lattice cycles") {
  for (const char* name : {"A1", "A2", "C2"}) {
    Group g = Group::builtin(name);
    QuotientNetwork net = build_network(g, lazy_uniform(g, 0.3));
    Ball ball = g.ball(8);
    std::mt19937_64 rng(41);
    for (int k = 0; k < g.rank(); ++k) {
      GroupElement target = g.identity();
      target.t[static_cast<std::size_t>(k)] = 1;
      auto idx = ball.find(target);
      REQUIRE(idx.has_value());
      const std::vector<int> path = ball.path_from_identity(*idx);

      Eigen::VectorXd v(g.rank());
      for (int i = 0; i < g.rank(); ++i) v[i] = u01_from_bits(rng()) * 2.0 - 1.0;
      OneForm u = harmonic_projection(net, coordinate_form(net, v)).u;

      // Walk the image cycle in G, summing u along quotient edges.
      double total = 0.0;
      GroupElement cur = g.identity();
      for (int gi : path) {
        const GroupElement s = g.generator_elements()[static_cast<std::size_t>(gi)];
        // Find the quotient edge (class(cur), atom s).
        const int vclass = cur.w;
        bool found = false;
        for (int e : net.out_edges[static_cast<std::size_t>(vclass)]) {
          if (net.mu.atoms[static_cast<std::size_t>(net.edges[static_cast<std::size_t>(e)].atom)].first == s) {
            total += u[e];
            found = true;
            break;
          }
        }
        REQUIRE(found);
        cur = g.multiply(cur, s);
      }
      const double expect = v.dot(g.basis().col(k));
      CHECK(total == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("covariance is positive definite across laziness values") {
  for (const char* name : {"A1", "A2", "C2", "A1xA1"}) {
    Group g = Group::builtin(name);
    for (double lazy : {0.1, 1.0 / 3.0, 0.9}) {
      Covariance sigma = covariance(build_network(g, lazy_uniform(g, lazy)));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.mat);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      CHECK((sigma.mat - sigma.mat.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("zero displacements raise DegenerateCovariance") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  for (auto& e : net.edges) e.disp.setZero();
  CHECK_THROWS_AS(covariance(net), DegenerateCovariance);
}

TEST_CASE("harmonic embedding corrections") {
  Group g = Group::builtin("A1");
  QuotientNetwork uni = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  CHECK(harmonic_embedding(uni).cwiseAbs().maxCoeff() < 1e-13);

  const double p = 0.5, q = 0.3;
  Measure mu = measure_from_atoms<double>(g, {{g.identity(), 1.0 - p - q},
                                              {gen(g, "s1"), p},
                                              {gen(g, "s2"), q}});
  QuotientNetwork net = build_network(g, mu);
  Eigen::MatrixXd h = harmonic_embedding(net);
  const int id_class = g.weyl_identity_index();
  CHECK(h(id_class, 0) == 0.0);
  CHECK(h(1 - id_class, 0) ==
        doctest::Approx((q - p) / (2 * (p + q))).epsilon(1e-12));
}

TEST_CASE("one-form csv dump") {
  Group g = Group::builtin("A1");
  QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
  Eigen::VectorXd v(1);
  v << 1.0;
  const std::string csv = one_form_to_csv(net, coordinate_form(net, v), false);
  CHECK(csv.find("edge,origin,terminus,generator,value") == 0);
  CHECK(csv.find("0.5") != std::string::npos);
}

TEST_CASE("harmonic embedding makes the walk a martingale (Monte Carlo)") {
  Group g = Group::builtin("A1");
  const double p = 0.5, q = 0.3;
  Measure mu = measure_from_atoms<double>(g, {{g.identity(), 1.0 - p - q},
                                              {gen(g, "s1"), p},
                                              {gen(g, "s2"), q}});
  QuotientNetwork net = build_network(g, mu);
  Eigen::MatrixXd h = harmonic_embedding(net);
  const int n = 50, samples = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < samples; ++s) {
    GroupElement w = sample_walk(mu, n, mix_stream(2024, static_cast<std::uint64_t>(s)));
    const double phi_h = g.embed(w)[0] - h(w.w, 0);
    sum += phi_h;
    sumsq += phi_h * phi_h;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sumsq / samples - mean * mean) / samples);
  CHECK(std::abs(mean) < 4.0 * se);
}
