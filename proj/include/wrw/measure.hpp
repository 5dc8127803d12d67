#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wrw/group.hpp"

namespace wrw {

struct MeasureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LazinessOutOfRange : MeasureError {
  using MeasureError::MeasureError;
};
struct RhoOutOfRange : MeasureError {
  using MeasureError::MeasureError;
};
struct GroupMismatch : MeasureError {
  using MeasureError::MeasureError;
};
struct SupportOverflow : MeasureError {
  using MeasureError::MeasureError;
};

// Atoms below this are dropped during convolution; the induced TV error is
// bounded by (atom count) * 1e-300.
inline constexpr double kPruneThreshold = 1e-300;
inline constexpr std::size_t kDefaultSupportCap = 5'000'000;

namespace detail {
inline bool prunable(double w) { return w < kPruneThreshold; }
inline bool prunable(const Rat& w) { return w == Rat(0); }
}  // namespace detail

// Finitely supported probability measure with atoms kept sorted by element.
// T is double by default; Rat gives the exact mode used by the oracles.
template <class T>
struct BasicMeasure {
  const Group* group = nullptr;
  std::vector<std::pair<GroupElement, T>> atoms;

  T weight(const GroupElement& g) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), g,
                               [](const auto& p, const GroupElement& e) { return p.first < e; });
    if (it != atoms.end() && it->first == g) return it->second;
    return T(0);
  }

  T total_mass() const {
    T s(0);
    for (const auto& [e, w] : atoms) s += w;
    return s;
  }
};

using Measure = BasicMeasure<double>;
using RationalMeasure = BasicMeasure<Rat>;

template <class T>
BasicMeasure<T> measure_from_atoms(const Group& group,
                                   std::vector<std::pair<GroupElement, T>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  BasicMeasure<T> m;
  m.group = &group;
  for (std::size_t i = 0; i < atoms.size();) {
    T w = atoms[i].second;
    std::size_t j = i + 1;
    while (j < atoms.size() && atoms[j].first == atoms[i].first) w += atoms[j++].second;
    if (!detail::prunable(w)) m.atoms.emplace_back(atoms[i].first, w);
    i = j;
  }
  return m;
}

template <class T>
BasicMeasure<T> delta_identity(const Group& group) {
  BasicMeasure<T> m;
  m.group = &group;
  m.atoms.emplace_back(group.identity(), T(1));
  return m;
}

// mu(id) = lazy, mu(s) = (1 - lazy)/|S| over the non-identity generators.
template <class T>
BasicMeasure<T> lazy_uniform_t(const Group& group, const T& lazy) {
  if (!(lazy > T(0)) || !(lazy < T(1)))
    throw LazinessOutOfRange("laziness must lie strictly between 0 and 1");
  std::vector<std::pair<GroupElement, T>> atoms;
  std::vector<GroupElement> gens;
  for (const auto& e : group.generator_elements())
    if (!group.is_identity(e)) gens.push_back(e);
  if (gens.empty()) throw MeasureError("group has no non-identity generators");
  const T share = (T(1) - lazy) / T(static_cast<long long>(gens.size()));
  atoms.emplace_back(group.identity(), lazy);
  for (const auto& e : gens) atoms.emplace_back(e, share);
  return measure_from_atoms(group, std::move(atoms));
}

inline Measure lazy_uniform(const Group& group, double lazy) {
  return lazy_uniform_t<double>(group, lazy);
}

namespace detail {

// Packed-key fast path for double convolution: (w | translation) in a uint64.
inline constexpr int kPackBits = 13;
inline constexpr std::int32_t kPackOffset = 1 << (kPackBits - 1);  // 4096

inline bool packable(const Group& g, std::int32_t max_abs_coord) {
  return g.rank() <= 4 && g.weyl_order() <= 1024 && max_abs_coord < kPackOffset - 1;
}

// t[0] occupies the most significant translation field so that ascending key
// order coincides with GroupElement's (w, t) lexicographic order.
inline std::uint64_t pack_elem(const GroupElement& e, int rank) {
  std::uint64_t key = static_cast<std::uint64_t>(e.w) << 52;
  for (int i = 0; i < rank; ++i)
    key |= static_cast<std::uint64_t>(static_cast<std::uint32_t>(
               e.t[static_cast<std::size_t>(i)] + kPackOffset))
           << (kPackBits * (rank - 1 - i));
  return key;
}

inline GroupElement unpack_elem(std::uint64_t key, int rank) {
  GroupElement e;
  e.w = static_cast<std::uint16_t>(key >> 52);
  for (int i = 0; i < rank; ++i)
    e.t[static_cast<std::size_t>(i)] =
        static_cast<std::int32_t>((key >> (kPackBits * (rank - 1 - i))) & ((1u << kPackBits) - 1)) -
        kPackOffset;
  return e;
}

template <class T>
std::int32_t max_abs_coord(const BasicMeasure<T>& m) {
  std::int32_t r = 0;
  for (const auto& [e, w] : m.atoms)
    for (int i = 0; i < m.group->rank(); ++i)
      r = std::max(r, std::abs(e.t[static_cast<std::size_t>(i)]));
  return r;
}

inline Measure convolve_packed(const Measure& a, const Measure& b, std::size_t cap) {
  const Group& g = *a.group;
  const int rank = g.rank();
  std::vector<std::pair<std::uint64_t, double>> tmp;
  tmp.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& [ea, wa] : a.atoms)
    for (const auto& [eb, wb] : b.atoms)
      tmp.emplace_back(pack_elem(g.multiply(ea, eb), rank), wa * wb);
  std::sort(tmp.begin(), tmp.end());
  Measure out;
  out.group = a.group;
  for (std::size_t i = 0; i < tmp.size();) {
    double w = tmp[i].second;
    std::size_t j = i + 1;
    while (j < tmp.size() && tmp[j].first == tmp[i].first) w += tmp[j++].second;
    if (!prunable(w)) out.atoms.emplace_back(unpack_elem(tmp[i].first, rank), w);
    i = j;
  }
  if (out.atoms.size() > cap)
    throw SupportOverflow("convolution support exceeds the configured cap");
  return out;
}

}  // namespace detail

// (a*b)(x) = sum_y a(y) b(y^{-1} x); iterates a's atoms then b's, accumulating
// in sorted-key order so results are bit-reproducible.
template <class T>
BasicMeasure<T> convolve(const BasicMeasure<T>& a, const BasicMeasure<T>& b,
                         std::size_t cap = kDefaultSupportCap) {
  if (a.group != b.group) throw GroupMismatch("convolve: measures live on different groups");
  const Group& g = *a.group;
  if constexpr (std::is_same_v<T, double>) {
    const std::int32_t bound = detail::max_abs_coord(a) + detail::max_abs_coord(b);
    if (detail::packable(g, bound)) return detail::convolve_packed(a, b, cap);
  }
  std::vector<std::pair<GroupElement, T>> tmp;
  tmp.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& [ea, wa] : a.atoms)
    for (const auto& [eb, wb] : b.atoms) tmp.emplace_back(g.multiply(ea, eb), wa * wb);
  auto out = measure_from_atoms(g, std::move(tmp));
  if (out.atoms.size() > cap) throw SupportOverflow("convolution support exceeds the configured cap");
  return out;
}

template <class T>
BasicMeasure<T> power(const BasicMeasure<T>& mu, int n, std::size_t cap = kDefaultSupportCap) {
  if (n < 0) throw MeasureError("power: n must be nonnegative");
  if constexpr (std::is_same_v<T, Rat>) {
    if (n > 8) throw MeasureError("rational mode is limited to n <= 8 (int64 overflow guard)");
  }
  auto acc = delta_identity<T>(*mu.group);
  for (int i = 0; i < n; ++i) acc = convolve(acc, mu, cap);
  return acc;
}

// pi^rho = rho (mu x mu) + (1 - rho) mu_diag on the product group.
template <class T>
BasicMeasure<T> noised_pair(const BasicMeasure<T>& mu, const T& rho, const Group& pair_group) {
  if (rho < T(0) || rho > T(1)) throw RhoOutOfRange("rho must lie in [0, 1]");
  const Group& g = *mu.group;
  if (pair_group.rank() != 2 * g.rank() || pair_group.weyl_order() != g.weyl_order() * g.weyl_order())
    throw GroupMismatch("noised_pair: pair group is not the square of the base group");
  const int m = g.rank();
  std::vector<std::pair<GroupElement, T>> atoms;
  for (const auto& [x, wx] : mu.atoms)
    for (const auto& [y, wy] : mu.atoms) {
      T w = rho * wx * wy;
      if (x == y) w += (T(1) - rho) * wx;
      if (detail::prunable(w)) continue;
      IntMat lin;
      lin.m = 2 * m;
      const IntMat& bx = g.weyl_matrix(x.w);
      const IntMat& by = g.weyl_matrix(y.w);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          lin.at(i, j) = bx.at(i, j);
          lin.at(m + i, m + j) = by.at(i, j);
        }
      IntVec tr{};
      for (int i = 0; i < m; ++i) {
        tr[static_cast<std::size_t>(i)] = x.t[static_cast<std::size_t>(i)];
        tr[static_cast<std::size_t>(m + i)] = y.t[static_cast<std::size_t>(i)];
      }
      atoms.emplace_back(pair_group.from_affine(lin, tr), w);
    }
  return measure_from_atoms(pair_group, std::move(atoms));
}

// Product measure a x b materialized on the pair group.
template <class T>
BasicMeasure<T> product_measure(const BasicMeasure<T>& a, const BasicMeasure<T>& b,
                                const Group& pair_group) {
  const Group& g = *a.group;
  if (a.group != b.group) throw GroupMismatch("product_measure: factors on different groups");
  const int m = g.rank();
  std::vector<std::pair<GroupElement, T>> atoms;
  atoms.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& [x, wx] : a.atoms)
    for (const auto& [y, wy] : b.atoms) {
      IntMat lin;
      lin.m = 2 * m;
      const IntMat& bx = g.weyl_matrix(x.w);
      const IntMat& by = g.weyl_matrix(y.w);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          lin.at(i, j) = bx.at(i, j);
          lin.at(m + i, m + j) = by.at(i, j);
        }
      IntVec tr{};
      for (int i = 0; i < m; ++i) {
        tr[static_cast<std::size_t>(i)] = x.t[static_cast<std::size_t>(i)];
        tr[static_cast<std::size_t>(m + i)] = y.t[static_cast<std::size_t>(i)];
      }
      atoms.emplace_back(pair_group.from_affine(lin, tr), wx * wy);
    }
  return measure_from_atoms(pair_group, std::move(atoms));
}

// Pushforward of a pair measure under a coordinate projection (0 or 1).
template <class T>
BasicMeasure<T> marginal(const BasicMeasure<T>& pair_mu, int coord, const Group& factor) {
  const Group& gp = *pair_mu.group;
  const int m = factor.rank();
  std::vector<std::pair<GroupElement, T>> atoms;
  atoms.reserve(pair_mu.atoms.size());
  for (const auto& [e, w] : pair_mu.atoms) {
    const IntMat& lin = gp.weyl_matrix(e.w);
    IntMat block;
    block.m = m;
    const int off = coord == 0 ? 0 : m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) block.at(i, j) = lin.at(off + i, off + j);
    IntVec tr{};
    for (int i = 0; i < m; ++i) tr[static_cast<std::size_t>(i)] = e.t[static_cast<std::size_t>(off + i)];
    atoms.emplace_back(factor.from_affine(block, tr), w);
  }
  return measure_from_atoms(factor, std::move(atoms));
}

// Half of the l^1 distance over the union of supports.
template <class T>
T tv_distance(const BasicMeasure<T>& a, const BasicMeasure<T>& b) {
  if (a.group != b.group) throw GroupMismatch("tv_distance: measures live on different groups");
  T s(0);
  std::size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i].first < b.atoms[j].first)) {
      s += a.atoms[i].second;
      ++i;
    } else if (i == a.atoms.size() || b.atoms[j].first < a.atoms[i].first) {
      s += b.atoms[j].second;
      ++j;
    } else {
      const T d = a.atoms[i].second - b.atoms[j].second;
      s += d < T(0) ? -d : d;
      ++i;
      ++j;
    }
  }
  return s / T(2);
}

// w_n = x_1 ... x_n with i.i.d. increments of law mu; deterministic in seed.
GroupElement sample_walk(const Measure& mu, int n, std::uint64_t seed);

std::string measure_to_csv(const Measure& mu, bool timestamp_header);

inline RationalMeasure to_rational(const Measure& m, long long denominator_hint = 0) {
  // Only used by tests for constructing small exact measures; weights must be
  // exactly representable with the given denominator.
  RationalMeasure r;
  r.group = m.group;
  for (const auto& [e, w] : m.atoms) {
    const long long den = denominator_hint > 0 ? denominator_hint : 1;
    const double scaled = w * static_cast<double>(den);
    const long long num = static_cast<long long>(std::llround(scaled));
    r.atoms.emplace_back(e, Rat(num, den));
  }
  return r;
}

inline Measure to_double_measure(const RationalMeasure& m) {
  Measure out;
  out.group = m.group;
  out.atoms.reserve(m.atoms.size());
  for (const auto& [e, w] : m.atoms) out.atoms.emplace_back(e, to_double(w));
  return out;
}

}  // namespace wrw
