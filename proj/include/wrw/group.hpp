#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace wrw {

using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// All group arithmetic is exact over integers in lattice-basis coordinates;
// the geometry lives in the basis matrix B mapping lattice coords to R^m.
constexpr int kMaxRank = 8;

using IntVec = std::array<std::int32_t, kMaxRank>;
using RatVec = std::array<Rat, kMaxRank>;

struct IntMat {
  int m = 0;
  std::array<std::int32_t, kMaxRank * kMaxRank> a{};  // row-major, m*m entries

  static IntMat identity(int m);
  std::int32_t& at(int i, int j) { return a[static_cast<std::size_t>(i * m + j)]; }
  std::int32_t at(int i, int j) const { return a[static_cast<std::size_t>(i * m + j)]; }
  IntMat operator*(const IntMat& o) const;
  IntVec apply(const IntVec& v) const;
  RatVec apply(const RatVec& v) const;
  bool operator==(const IntMat& o) const { return m == o.m && a == o.a; }
  auto operator<=>(const IntMat& o) const = default;
  long long det() const;
};

// An element of Gamma = Lambda x| W: `w` indexes the group's enumerated Weyl
// table (sorted lexicographically by matrix entries), `t` is the translation
// part in lattice coordinates.
struct GroupElement {
  std::uint16_t w = 0;
  IntVec t{};

  bool operator==(const GroupElement& o) const { return w == o.w && t == o.t; }
  auto operator<=>(const GroupElement& o) const = default;
};

struct ElemHash {
  std::size_t operator()(const GroupElement& g) const;
};

struct Generator {
  std::string name;
  IntMat linear;
  IntVec trans{};
};

struct GroupSpec {
  int rank = 0;
  std::vector<Generator> generators;
  Eigen::MatrixXd basis;       // m x m; columns are the lattice basis vectors in R^m
  RatVec basepoint{};          // interior point of the fundamental chamber, lattice coords
  std::size_t weyl_order = 0;
  double covolume = 1.0;       // declared |det basis|
  std::string name;            // optional label ("A1", ...)
  std::vector<std::string> factors;  // nonempty for product groups
};

struct GroupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonInvolutionGenerator : GroupError {
  using GroupError::GroupError;
};
struct WeylClosureOverflow : GroupError {
  using GroupError::GroupError;
};
struct EmbeddingCollision : GroupError {
  using GroupError::GroupError;
};
struct GroupSpecError : GroupError {
  using GroupError::GroupError;
};

class Group;

// Ball B_S(r) enumerated by BFS from the identity over right multiplication.
// Elements are stored in discovery order (by word norm, then deterministic);
// parents allow recovery of a geodesic edge path back to the identity.
struct Ball {
  std::vector<GroupElement> elems;
  std::vector<int> norm;        // word norm per element
  std::vector<int> parent;      // index of predecessor (-1 for identity)
  std::vector<int> parent_gen;  // generator index used to reach elems[i]

  std::optional<std::size_t> find(const GroupElement& g) const;
  // Generator indices multiplying id up to elems[i].
  std::vector<int> path_from_identity(std::size_t i) const;

 private:
  friend class Group;
  std::vector<std::pair<GroupElement, std::size_t>> index_;  // sorted for lookup
};

class Group {
 public:
  // Enumerates W by closing the generator linear parts under multiplication.
  // Throws NonInvolutionGenerator / WeylClosureOverflow / EmbeddingCollision /
  // GroupSpecError per the construction contract.
  static Group build(GroupSpec spec);
  static Group builtin(const std::string& name);  // A1, A1xA1, A2, C2
  static GroupSpec builtin_spec(const std::string& name);
  static Group product(const Group& g1, const Group& g2);
  // Z^m with the standard step set {+-e_i}; the Weyl part is trivial. The step
  // translations are not involutions, so this bypasses build()'s checks.
  static Group free_abelian(int rank);

  int rank() const { return spec_.rank; }
  const GroupSpec& spec() const { return spec_; }
  std::size_t weyl_order() const { return weyl_.size(); }
  const IntMat& weyl_matrix(int w) const { return weyl_[static_cast<std::size_t>(w)]; }
  int weyl_identity_index() const { return id_w_; }
  int weyl_mult(int w1, int w2) const {
    return wmul_[static_cast<std::size_t>(w1) * weyl_.size() + static_cast<std::size_t>(w2)];
  }
  int weyl_inverse(int w) const { return winv_[static_cast<std::size_t>(w)]; }
  std::optional<int> weyl_index(const IntMat& mat) const;

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement inverse(const GroupElement& g) const;
  bool is_identity(const GroupElement& g) const;
  GroupElement from_affine(const IntMat& linear, const IntVec& trans) const;

  // Generators as elements, in spec order (may contain the identity for
  // product generating sets S_*).
  const std::vector<GroupElement>& generator_elements() const { return gen_elems_; }
  const std::vector<std::string>& generator_names() const { return gen_names_; }

  // g.o - o in lattice coordinates, exact.
  RatVec orbit_offset_rational(const GroupElement& g) const;
  // Phi(g) = B (g.o - o).
  Eigen::VectorXd embed(const GroupElement& g) const;
  const Eigen::MatrixXd& basis() const { return spec_.basis; }
  double covolume() const { return spec_.covolume; }

  Ball ball(int radius) const;

  std::string describe(const GroupElement& g) const;

 private:
  Group() = default;
  void finalize();  // builds tables from spec_ + weyl_

  GroupSpec spec_;
  std::vector<IntMat> weyl_;  // sorted lexicographically by entries
  std::vector<int> wmul_;
  std::vector<int> winv_;
  int id_w_ = 0;
  std::vector<GroupElement> gen_elems_;
  std::vector<std::string> gen_names_;
};

// Group spec file round-trip (JSON-compatible structured text).
GroupSpec load_group_spec(const std::string& path);
void save_group_spec(const GroupSpec& spec, const std::string& path);
GroupSpec parse_group_spec_json(const std::string& text);
std::string group_spec_to_json(const GroupSpec& spec);

// Resolves a built-in name or a path to a spec file.
Group resolve_group(const std::string& name_or_path);

}  // namespace wrw
