#pragma once

// Test-side oracles, kept independent of the library's convolution path: walk
// distributions are computed by enumerating every increment sequence.

#include <map>
#include <vector>

#include "wrw/measure.hpp"

namespace wrw::testing {

template <class T>
std::map<GroupElement, T> enumerate_walk(const Group& g,
                                         const std::vector<std::pair<GroupElement, T>>& step,
                                         int n) {
  std::map<GroupElement, T> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    GroupElement cur = g.identity();
    T w(1);
    for (int i = 0; i < n; ++i) {
      const auto& [e, we] = step[idx[static_cast<std::size_t>(i)]];
      cur = g.multiply(cur, e);
      w = w * we;
    }
    out[cur] += w;
    int pos = n - 1;
    while (pos >= 0) {
      if (++idx[static_cast<std::size_t>(pos)] < step.size()) break;
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  if (n == 0) out[g.identity()] = T(1);
  return out;
}

template <class T>
std::map<GroupElement, T> enumerate_walk(const BasicMeasure<T>& mu, int n) {
  return enumerate_walk(*mu.group, mu.atoms, n);
}

template <class T>
bool equals_measure(const std::map<GroupElement, T>& oracle, const BasicMeasure<T>& m) {
  if (oracle.size() != m.atoms.size()) return false;
  std::size_t i = 0;
  for (const auto& [e, w] : oracle) {
    if (!(m.atoms[i].first == e) || !(m.atoms[i].second == w)) return false;
    ++i;
  }
  return true;
}

}  // namespace wrw::testing
