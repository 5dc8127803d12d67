#include "wrw/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "wrw/util.hpp"

namespace wrw {

IntMat IntMat::identity(int m) {
  IntMat r;
  r.m = m;
  for (int i = 0; i < m; ++i) r.at(i, i) = 1;
  return r;
}

IntMat IntMat::operator*(const IntMat& o) const {
  IntMat r;
  r.m = m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::int32_t s = 0;
      for (int k = 0; k < m; ++k) s += at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

IntVec IntMat::apply(const IntVec& v) const {
  IntVec r{};
  for (int i = 0; i < m; ++i) {
    std::int32_t s = 0;
    for (int j = 0; j < m; ++j) s += at(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

RatVec IntMat::apply(const RatVec& v) const {
  RatVec r{};
  for (int i = 0; i < m; ++i) {
    Rat s(0);
    for (int j = 0; j < m; ++j) s += Rat(at(i, j)) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

long long IntMat::det() const {
  // Fraction-free Gaussian elimination (Bareiss); m <= 8 so overflow is not a
  // concern for the +-1-entry matrices seen here.
  long long b[kMaxRank][kMaxRank];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b[i][j] = at(i, j);
  long long prev = 1, sign = 1;
  for (int k = 0; k < m - 1; ++k) {
    if (b[k][k] == 0) {
      int p = -1;
      for (int i = k + 1; i < m; ++i)
        if (b[i][k] != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < m; ++j) std::swap(b[k][j], b[p][j]);
      sign = -sign;
    }
    for (int i = k + 1; i < m; ++i)
      for (int j = k + 1; j < m; ++j) b[i][j] = (b[i][j] * b[k][k] - b[i][k] * b[k][j]) / prev;
    prev = b[k][k];
  }
  return sign * b[m - 1][m - 1];
}

std::size_t ElemHash::operator()(const GroupElement& g) const {
  std::uint64_t h = splitmix64(g.w + 0x9e37ULL);
  for (int i = 0; i < kMaxRank; ++i) {
    const auto coord = static_cast<std::uint64_t>(
        static_cast<std::uint32_t>(g.t[static_cast<std::size_t>(i)]));
    h = splitmix64(h ^ (coord + static_cast<std::uint64_t>(i) * 0x1000193ULL));
  }
  return static_cast<std::size_t>(h);
}

std::optional<std::size_t> Ball::find(const GroupElement& g) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), g,
                             [](const auto& p, const GroupElement& e) { return p.first < e; });
  if (it != index_.end() && it->first == g) return it->second;
  return std::nullopt;
}

std::vector<int> Ball::path_from_identity(std::size_t i) const {
  std::vector<int> gens;
  while (parent[i] >= 0) {
    gens.push_back(parent_gen[i]);
    i = static_cast<std::size_t>(parent[i]);
  }
  std::reverse(gens.begin(), gens.end());
  return gens;
}

namespace {

bool is_identity_mat(const IntMat& mat) { return mat == IntMat::identity(mat.m); }

bool is_zero_vec(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](std::int32_t x) { return x == 0; });
}

}  // namespace

Group Group::build(GroupSpec spec) {
  if (spec.rank < 1 || spec.rank > kMaxRank)
    throw GroupSpecError("group rank must be in [1, " + std::to_string(kMaxRank) + "]");
  if (spec.generators.empty()) throw GroupSpecError("group spec has no generators");
  if (spec.basis.rows() != spec.rank || spec.basis.cols() != spec.rank)
    throw GroupSpecError("basis must be rank x rank");
  const double det = std::abs(spec.basis.determinant());
  if (std::abs(det - spec.covolume) > 1e-9 * std::max(1.0, spec.covolume))
    throw GroupSpecError("|det basis| does not match the declared covolume");
  if (spec.weyl_order == 0 || spec.weyl_order > 1024)
    throw GroupSpecError("declared weyl_order must be in [1, 1024]");

  for (const auto& g : spec.generators) {
    if (g.linear.m != spec.rank) throw GroupSpecError("generator rank mismatch: " + g.name);
    const long long d = g.linear.det();
    if (d != 1 && d != -1) throw GroupSpecError("generator linear part not unimodular: " + g.name);
    const IntMat sq = g.linear * g.linear;
    const IntVec shift = g.linear.apply(g.trans);
    IntVec total{};
    for (int i = 0; i < spec.rank; ++i)
      total[static_cast<std::size_t>(i)] = shift[static_cast<std::size_t>(i)] + g.trans[static_cast<std::size_t>(i)];
    if (!is_identity_mat(sq) || !is_zero_vec(total))
      throw NonInvolutionGenerator("generator is not an involution: " + g.name);
  }

  // Close the linear parts under multiplication.
  constexpr std::size_t kClosureCap = 10000;
  std::vector<IntMat> weyl{IntMat::identity(spec.rank)};
  std::deque<IntMat> frontier(weyl.begin(), weyl.end());
  auto known = [&weyl](const IntMat& mat) {
    return std::find(weyl.begin(), weyl.end(), mat) != weyl.end();
  };
  while (!frontier.empty()) {
    IntMat cur = frontier.front();
    frontier.pop_front();
    for (const auto& g : spec.generators) {
      IntMat nxt = cur * g.linear;
      if (!known(nxt)) {
        weyl.push_back(nxt);
        frontier.push_back(nxt);
        if (weyl.size() > kClosureCap)
          throw WeylClosureOverflow("Weyl closure exceeded " + std::to_string(kClosureCap) +
                                    " elements; generators do not define the declared finite W");
      }
    }
  }
  if (weyl.size() != spec.weyl_order)
    throw GroupSpecError("enumerated |W| = " + std::to_string(weyl.size()) +
                         " does not match declared weyl_order = " + std::to_string(spec.weyl_order));

  std::sort(weyl.begin(), weyl.end());

  Group grp;
  grp.spec_ = std::move(spec);
  grp.weyl_ = std::move(weyl);
  grp.finalize();

  // Injectivity sanity check on a small ball; a basepoint on a wall collides.
  Ball b = grp.ball(4);
  std::vector<RatVec> pts;
  pts.reserve(b.elems.size());
  for (const auto& e : b.elems) pts.push_back(grp.orbit_offset_rational(e));
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw EmbeddingCollision("two ball elements share the same orbit point; basepoint is not interior");
  return grp;
}

void Group::finalize() {
  const std::size_t n = weyl_.size();
  std::vector<std::pair<IntMat, int>> lookup;
  lookup.reserve(n);
  for (std::size_t i = 0; i < n; ++i) lookup.emplace_back(weyl_[i], static_cast<int>(i));
  std::sort(lookup.begin(), lookup.end());

  auto find_w = [&lookup](const IntMat& mat) -> int {
    auto it = std::lower_bound(lookup.begin(), lookup.end(), mat,
                               [](const auto& p, const IntMat& mm) { return p.first < mm; });
    if (it == lookup.end() || !(it->first == mat)) return -1;
    return it->second;
  };

  wmul_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const int k = find_w(weyl_[i] * weyl_[j]);
      if (k < 0) throw GroupSpecError("Weyl table is not closed under multiplication");
      wmul_[i * n + j] = k;
    }
  id_w_ = find_w(IntMat::identity(spec_.rank));
  if (id_w_ < 0) throw GroupSpecError("Weyl table lacks the identity");

  winv_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (wmul_[i * n + j] == id_w_) {
        winv_[i] = static_cast<int>(j);
        break;
      }
    if (winv_[i] < 0) throw GroupSpecError("Weyl element without inverse");
  }

  gen_elems_.clear();
  gen_names_.clear();
  for (const auto& g : spec_.generators) {
    const int w = find_w(g.linear);
    if (w < 0) throw GroupSpecError("generator linear part missing from Weyl table");
    GroupElement e;
    e.w = static_cast<std::uint16_t>(w);
    e.t = g.trans;
    gen_elems_.push_back(e);
    gen_names_.push_back(g.name);
  }
}

std::optional<int> Group::weyl_index(const IntMat& mat) const {
  auto it = std::lower_bound(weyl_.begin(), weyl_.end(), mat);
  if (it == weyl_.end() || !(*it == mat)) return std::nullopt;
  return static_cast<int>(it - weyl_.begin());
}

GroupElement Group::identity() const {
  GroupElement e;
  e.w = static_cast<std::uint16_t>(id_w_);
  return e;
}

GroupElement Group::multiply(const GroupElement& g, const GroupElement& h) const {
  GroupElement r;
  r.w = static_cast<std::uint16_t>(weyl_mult(g.w, h.w));
  const IntVec moved = weyl_[g.w].apply(h.t);
  for (int i = 0; i < spec_.rank; ++i)
    r.t[static_cast<std::size_t>(i)] = moved[static_cast<std::size_t>(i)] + g.t[static_cast<std::size_t>(i)];
  return r;
}

GroupElement Group::inverse(const GroupElement& g) const {
  GroupElement r;
  r.w = static_cast<std::uint16_t>(weyl_inverse(g.w));
  const IntVec moved = weyl_[r.w].apply(g.t);
  for (int i = 0; i < spec_.rank; ++i) r.t[static_cast<std::size_t>(i)] = -moved[static_cast<std::size_t>(i)];
  return r;
}

bool Group::is_identity(const GroupElement& g) const {
  return g.w == static_cast<std::uint16_t>(id_w_) && is_zero_vec(g.t);
}

GroupElement Group::from_affine(const IntMat& linear, const IntVec& trans) const {
  const auto w = weyl_index(linear);
  if (!w) throw GroupSpecError("linear part is not in the enumerated Weyl group");
  GroupElement e;
  e.w = static_cast<std::uint16_t>(*w);
  e.t = trans;
  return e;
}

RatVec Group::orbit_offset_rational(const GroupElement& g) const {
  RatVec moved = weyl_[g.w].apply(spec_.basepoint);
  RatVec r{};
  for (int i = 0; i < spec_.rank; ++i) {
    const auto k = static_cast<std::size_t>(i);
    r[k] = moved[k] + Rat(g.t[k]) - spec_.basepoint[k];
  }
  return r;
}

Eigen::VectorXd Group::embed(const GroupElement& g) const {
  const RatVec off = orbit_offset_rational(g);
  Eigen::VectorXd v(spec_.rank);
  for (int i = 0; i < spec_.rank; ++i) v[i] = to_double(off[static_cast<std::size_t>(i)]);
  return spec_.basis * v;
}

Ball Group::ball(int radius) const {
  Ball b;
  std::unordered_map<GroupElement, std::size_t, ElemHash> seen;
  b.elems.push_back(identity());
  b.norm.push_back(0);
  b.parent.push_back(-1);
  b.parent_gen.push_back(-1);
  seen.emplace(b.elems[0], 0);

  std::size_t head = 0;
  while (head < b.elems.size()) {
    const std::size_t cur = head++;
    if (b.norm[cur] >= radius) continue;
    for (std::size_t gi = 0; gi < gen_elems_.size(); ++gi) {
      if (is_identity(gen_elems_[gi])) continue;
      GroupElement nxt = multiply(b.elems[cur], gen_elems_[gi]);
      if (seen.emplace(nxt, b.elems.size()).second) {
        b.elems.push_back(nxt);
        b.norm.push_back(b.norm[cur] + 1);
        b.parent.push_back(static_cast<int>(cur));
        b.parent_gen.push_back(static_cast<int>(gi));
      }
    }
  }
  b.index_.reserve(b.elems.size());
  for (std::size_t i = 0; i < b.elems.size(); ++i) b.index_.emplace_back(b.elems[i], i);
  std::sort(b.index_.begin(), b.index_.end());
  return b;
}

std::string Group::describe(const GroupElement& g) const {
  std::ostringstream os;
  const IntMat& mat = weyl_[g.w];
  for (int i = 0; i < spec_.rank; ++i)
    for (int j = 0; j < spec_.rank; ++j) {
      if (i || j) os << ' ';
      os << mat.at(i, j);
    }
  os << ';';
  for (int i = 0; i < spec_.rank; ++i) {
    if (i) os << ' ';
    os << g.t[static_cast<std::size_t>(i)];
  }
  return os.str();
}

namespace {

Generator make_gen(const std::string& name, int m, std::initializer_list<int> linear,
                   std::initializer_list<int> trans) {
  Generator g;
  g.name = name;
  g.linear.m = m;
  int i = 0;
  for (int v : linear) g.linear.a[static_cast<std::size_t>(i++)] = v;
  i = 0;
  for (int v : trans) g.trans[static_cast<std::size_t>(i++)] = v;
  return g;
}

}  // namespace

GroupSpec Group::builtin_spec(const std::string& name) {
  GroupSpec s;
  if (name == "A1") {
    // Reflections across 0 and 1/2; chamber [0, 1/2], Lambda = Z, o = 1/4.
    s.rank = 1;
    s.name = "A1";
    s.generators = {make_gen("s1", 1, {-1}, {0}), make_gen("s2", 1, {-1}, {1})};
    s.basis = Eigen::MatrixXd::Identity(1, 1);
    s.basepoint[0] = Rat(1, 4);
    s.weyl_order = 2;
    s.covolume = 1.0;
    return s;
  }
  if (name == "A2") {
    // Simple-root coordinates; the hexagonal fundamental domain of Lambda has
    // unit area, which fixes the basis length l = sqrt(2/sqrt(3)).
    s.rank = 2;
    s.name = "A2";
    s.generators = {make_gen("s1", 2, {-1, 1, 0, 1}, {0, 0}),
                    make_gen("s2", 2, {1, 0, 1, -1}, {0, 0}),
                    make_gen("s3", 2, {0, -1, -1, 0}, {1, 1})};
    const double l = std::sqrt(2.0 / std::sqrt(3.0));
    s.basis = Eigen::MatrixXd(2, 2);
    s.basis << l, -l / 2.0, 0.0, l * std::sqrt(3.0) / 2.0;
    s.basepoint[0] = Rat(1, 3);
    s.basepoint[1] = Rat(1, 3);
    s.weyl_order = 6;
    s.covolume = 1.0;
    return s;
  }
  if (name == "C2") {
    // Chamber = isosceles right triangle with legs 1/2; walls y=0, x=y, x=1/2.
    // Basepoint is the center of the side-1/4 square inside the chamber.
    s.rank = 2;
    s.name = "C2";
    s.generators = {make_gen("s1", 2, {1, 0, 0, -1}, {0, 0}),
                    make_gen("s2", 2, {0, 1, 1, 0}, {0, 0}),
                    make_gen("s3", 2, {-1, 0, 0, 1}, {1, 0})};
    s.basis = Eigen::MatrixXd::Identity(2, 2);
    s.basepoint[0] = Rat(3, 8);
    s.basepoint[1] = Rat(1, 8);
    s.weyl_order = 8;
    s.covolume = 1.0;
    return s;
  }
  if (name == "A1xA1") {
    return Group::product(Group::builtin("A1"), Group::builtin("A1")).spec();
  }
  throw GroupSpecError("unknown built-in group: " + name);
}

Group Group::builtin(const std::string& name) { return Group::build(builtin_spec(name)); }

Group Group::product(const Group& g1, const Group& g2) {
  const int m1 = g1.rank(), m2 = g2.rank();
  GroupSpec s;
  s.rank = m1 + m2;
  if (s.rank > kMaxRank) throw GroupSpecError("product rank exceeds the supported maximum");
  s.name = (g1.spec().name.empty() ? "G1" : g1.spec().name) + "x" +
           (g2.spec().name.empty() ? "G2" : g2.spec().name);
  s.factors = {g1.spec().name, g2.spec().name};
  s.weyl_order = g1.weyl_order() * g2.weyl_order();
  s.covolume = g1.covolume() * g2.covolume();
  s.basis = Eigen::MatrixXd::Zero(s.rank, s.rank);
  s.basis.topLeftCorner(m1, m1) = g1.basis();
  s.basis.bottomRightCorner(m2, m2) = g2.basis();
  for (int i = 0; i < m1; ++i)
    s.basepoint[static_cast<std::size_t>(i)] = g1.spec().basepoint[static_cast<std::size_t>(i)];
  for (int i = 0; i < m2; ++i)
    s.basepoint[static_cast<std::size_t>(m1 + i)] = g2.spec().basepoint[static_cast<std::size_t>(i)];

  // Full product generating set S_* = (S u {id})^2, identity pair included.
  auto with_id = [](const Group& g) {
    std::vector<std::pair<std::string, GroupElement>> v;
    v.emplace_back("id", g.identity());
    for (std::size_t i = 0; i < g.generator_elements().size(); ++i)
      if (!g.is_identity(g.generator_elements()[i]))
        v.emplace_back(g.generator_names()[i], g.generator_elements()[i]);
    return v;
  };
  for (const auto& [n1, e1] : with_id(g1))
    for (const auto& [n2, e2] : with_id(g2)) {
      Generator gen;
      gen.name = "(" + n1 + "," + n2 + ")";
      gen.linear.m = s.rank;
      const IntMat& b1 = g1.weyl_matrix(e1.w);
      const IntMat& b2 = g2.weyl_matrix(e2.w);
      for (int i = 0; i < m1; ++i)
        for (int j = 0; j < m1; ++j) gen.linear.at(i, j) = b1.at(i, j);
      for (int i = 0; i < m2; ++i)
        for (int j = 0; j < m2; ++j) gen.linear.at(m1 + i, m1 + j) = b2.at(i, j);
      for (int i = 0; i < m1; ++i) gen.trans[static_cast<std::size_t>(i)] = e1.t[static_cast<std::size_t>(i)];
      for (int i = 0; i < m2; ++i)
        gen.trans[static_cast<std::size_t>(m1 + i)] = e2.t[static_cast<std::size_t>(i)];
      s.generators.push_back(gen);
    }
  return Group::build(std::move(s));
}

Group Group::free_abelian(int rank) {
  if (rank < 1 || rank > kMaxRank) throw GroupSpecError("free_abelian rank out of range");
  Group grp;
  grp.spec_.rank = rank;
  grp.spec_.name = "Z^" + std::to_string(rank);
  grp.spec_.weyl_order = 1;
  grp.spec_.covolume = 1.0;
  grp.spec_.basis = Eigen::MatrixXd::Identity(rank, rank);
  for (int i = 0; i < rank; ++i) {
    Generator plus;
    plus.name = "e" + std::to_string(i + 1) + "+";
    plus.linear = IntMat::identity(rank);
    plus.trans[static_cast<std::size_t>(i)] = 1;
    Generator minus;
    minus.name = "e" + std::to_string(i + 1) + "-";
    minus.linear = IntMat::identity(rank);
    minus.trans[static_cast<std::size_t>(i)] = -1;
    grp.spec_.generators.push_back(plus);
    grp.spec_.generators.push_back(minus);
  }
  grp.weyl_ = {IntMat::identity(rank)};
  grp.finalize();
  return grp;
}

// ---------------------------------------------------------------------------
// Spec file I/O

namespace {

using nlohmann::json;

json rat_to_json(const Rat& r) { return json::array({r.numerator(), r.denominator()}); }

Rat rat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw GroupSpecError("basepoint entries must be [num, den] pairs");
  return Rat(j[0].get<long long>(), j[1].get<long long>());
}

}  // namespace

std::string group_spec_to_json(const GroupSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["rank"] = spec.rank;
  j["weyl_order"] = spec.weyl_order;
  j["covolume"] = spec.covolume;
  json gens = json::array();
  for (const auto& g : spec.generators) {
    json jg;
    jg["name"] = g.name;
    std::vector<int> lin;
    for (int i = 0; i < spec.rank; ++i)
      for (int k = 0; k < spec.rank; ++k) lin.push_back(g.linear.at(i, k));
    jg["linear"] = lin;
    std::vector<int> tr(g.trans.begin(), g.trans.begin() + spec.rank);
    jg["trans"] = tr;
    gens.push_back(jg);
  }
  j["generators"] = gens;
  std::vector<double> basis;
  for (int i = 0; i < spec.rank; ++i)
    for (int k = 0; k < spec.rank; ++k) basis.push_back(spec.basis(i, k));
  j["basis"] = basis;
  json bp = json::array();
  for (int i = 0; i < spec.rank; ++i) bp.push_back(rat_to_json(spec.basepoint[static_cast<std::size_t>(i)]));
  j["basepoint"] = bp;
  if (!spec.factors.empty()) j["factors"] = spec.factors;
  return j.dump(2);
}

GroupSpec parse_group_spec_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw GroupSpecError(std::string("group spec parse error: ") + e.what());
  }
  GroupSpec spec;
  try {
    spec.rank = j.at("rank").get<int>();
    if (spec.rank < 1 || spec.rank > kMaxRank) throw GroupSpecError("rank out of range");
    spec.name = j.value("name", std::string());
    spec.weyl_order = j.at("weyl_order").get<std::size_t>();
    spec.covolume = j.value("covolume", 1.0);
    for (const auto& jg : j.at("generators")) {
      Generator g;
      g.name = jg.at("name").get<std::string>();
      const auto lin = jg.at("linear").get<std::vector<int>>();
      if (lin.size() != static_cast<std::size_t>(spec.rank * spec.rank))
        throw GroupSpecError("generator linear list has wrong length: " + g.name);
      g.linear.m = spec.rank;
      for (std::size_t i = 0; i < lin.size(); ++i) g.linear.a[i] = lin[i];
      const auto tr = jg.at("trans").get<std::vector<int>>();
      if (tr.size() != static_cast<std::size_t>(spec.rank))
        throw GroupSpecError("generator trans list has wrong length: " + g.name);
      for (std::size_t i = 0; i < tr.size(); ++i) g.trans[i] = tr[i];
      spec.generators.push_back(g);
    }
    const auto basis = j.at("basis").get<std::vector<double>>();
    if (basis.size() != static_cast<std::size_t>(spec.rank * spec.rank))
      throw GroupSpecError("basis list has wrong length");
    spec.basis = Eigen::MatrixXd(spec.rank, spec.rank);
    for (int i = 0; i < spec.rank; ++i)
      for (int k = 0; k < spec.rank; ++k)
        spec.basis(i, k) = basis[static_cast<std::size_t>(i * spec.rank + k)];
    const auto& bp = j.at("basepoint");
    if (!bp.is_array() || bp.size() != static_cast<std::size_t>(spec.rank))
      throw GroupSpecError("basepoint list has wrong length");
    for (int i = 0; i < spec.rank; ++i)
      spec.basepoint[static_cast<std::size_t>(i)] = rat_from_json(bp[static_cast<std::size_t>(i)]);
    if (j.contains("factors")) spec.factors = j["factors"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw GroupSpecError(std::string("group spec field error: ") + e.what());
  }
  return spec;
}

GroupSpec load_group_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GroupSpecError("cannot open group spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_group_spec_json(ss.str());
}

void save_group_spec(const GroupSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GroupSpecError("cannot write group spec file: " + path);
  out << group_spec_to_json(spec) << '\n';
}

Group resolve_group(const std::string& name_or_path) {
  for (const char* b : {"A1", "A1xA1", "A2", "C2"})
    if (name_or_path == b) return Group::builtin(name_or_path);
  return Group::build(load_group_spec(name_or_path));
}

}  // namespace wrw
