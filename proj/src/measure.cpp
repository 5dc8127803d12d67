#include "wrw/measure.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "wrw/util.hpp"

namespace wrw {

GroupElement sample_walk(const Measure& mu, int n, std::uint64_t seed) {
  if (n < 0) throw MeasureError("sample_walk: n must be nonnegative");
  const Group& g = *mu.group;
  std::vector<double> cum;
  cum.reserve(mu.atoms.size());
  double acc = 0.0;
  for (const auto& [e, w] : mu.atoms) {
    acc += w;
    cum.push_back(acc);
  }
  std::mt19937_64 rng(splitmix64(seed));
  GroupElement cur = g.identity();
  for (int i = 0; i < n; ++i) {
    const double u = u01_from_bits(rng()) * acc;
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    cur = g.multiply(cur, mu.atoms[std::min(k, mu.atoms.size() - 1)].first);
  }
  return cur;
}

std::string measure_to_csv(const Measure& mu, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("measure dump");
  os << "element,weight\n";
  char buf[64];
  for (const auto& [e, w] : mu.atoms) {
    std::snprintf(buf, sizeof buf, "%.17g", w);
    os << '"' << mu.group->describe(e) << "\"," << buf << '\n';
  }
  return os.str();
}

}  // namespace wrw
