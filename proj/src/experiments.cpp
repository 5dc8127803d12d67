#include "wrw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "wrw/util.hpp"

namespace wrw {

namespace {

double ns_normalizer(int n, int pair_rank) {
  if (n <= 1) return 0.0;
  return std::sqrt(static_cast<double>(n)) / std::pow(std::log(static_cast<double>(n)), pair_rank);
}

void validate_ns_config(const Group& factor, const NsConfig& cfg) {
  for (double rho : cfg.rho) {
    if (rho < 0.0 || rho > 1.0) throw RhoOutOfRange("rho must lie in [0, 1]");
    if (rho == 0.0 && cfg.mode == NsMode::kExact && !cfg.allow_rho_zero)
      throw RhoZeroInExactNS(
          "rho = 0 yields the diagonal walk with TV -> 1; pass allow_rho_zero to run it");
  }
  if (cfg.n.empty()) throw std::invalid_argument("ns_curve: empty n list");
  for (std::size_t i = 0; i < cfg.n.size(); ++i) {
    if (cfg.n[i] < 0) throw std::invalid_argument("ns_curve: n must be nonnegative");
    if (i > 0 && cfg.n[i] <= cfg.n[i - 1])
      throw std::invalid_argument("ns_curve: n list must be strictly ascending");
  }
  if (factor.rank() > 1 && cfg.mode == NsMode::kExact) {
    if (!cfg.allow_large_rank)
      throw std::invalid_argument(
          "exact NS on rank-2 factors builds rank-4 pair supports; pass allow_large_rank");
    if (cfg.n.back() > 64)
      throw std::invalid_argument("exact NS on rank-2 factors is capped at n <= 64");
  }
}

void exact_cells(const Group& factor, const Group& pair, const NsConfig& cfg, double rho,
                 std::vector<NsCell>& out) {
  const Measure mu = lazy_uniform(factor, cfg.lazy);
  Stopwatch total;
  if (rho == 1.0) {
    // pi^1_n = mu_n x mu_n identically (independence); verified exactly in
    // rational mode by the oracle tests.
    for (int n : cfg.n) {
      NsCell cell;
      cell.rho = rho;
      cell.n = n;
      cell.tv = 0.0;
      cell.normalized = 0.0;
      cell.seconds = total.seconds();
      out.push_back(cell);
    }
    return;
  }
  const Measure pi = noised_pair(mu, rho, pair);
  Measure walk = delta_identity<double>(pair);
  Measure factor_walk = delta_identity<double>(factor);
  int k = 0;
  for (int n : cfg.n) {
    Stopwatch cell_time;
    for (; k < n; ++k) {
      walk = convolve(walk, pi, cfg.support_cap);
      factor_walk = convolve(factor_walk, mu, cfg.support_cap);
    }
    const Measure prod = product_measure(factor_walk, factor_walk, pair);
    NsCell cell;
    cell.rho = rho;
    cell.n = n;
    cell.tv = tv_distance(walk, prod);
    cell.normalized = cell.tv * ns_normalizer(n, pair.rank());
    cell.seconds = cell_time.seconds();
    out.push_back(cell);
  }
}

struct PairKey {
  GroupElement a, b;
  bool operator==(const PairKey& o) const { return a == o.a && b == o.b; }
  auto operator<=>(const PairKey& o) const = default;
};

void monte_carlo_cells(const Group& factor, const NsConfig& cfg, double rho, int rho_idx,
                       std::vector<NsCell>& out) {
  const Measure mu = lazy_uniform(factor, cfg.lazy);
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& [e, w] : mu.atoms) cum.push_back(acc += w);

  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    const int n = cfg.n[ni];
    Stopwatch cell_time;
    const Measure mu_n = power(mu, n, cfg.support_cap);

    const long half = std::max<long>(cfg.samples / 2, 1);
    std::map<PairKey, long> counts1, counts2;
    for (int phase = 0; phase < 2; ++phase) {
      auto& counts = phase == 0 ? counts1 : counts2;
      std::mt19937_64 rng(mix_stream(cfg.seed, static_cast<std::uint64_t>(rho_idx),
                                     static_cast<std::uint64_t>(ni),
                                     static_cast<std::uint64_t>(phase)));
      for (long s = 0; s < half; ++s) {
        GroupElement w = factor.identity(), wp = factor.identity();
        for (int i = 0; i < n; ++i) {
          auto draw = [&]() {
            const double u = u01_from_bits(rng()) * acc;
            const std::size_t k = static_cast<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            return mu.atoms[std::min(k, mu.atoms.size() - 1)].first;
          };
          const GroupElement x = draw();
          const bool resample = u01_from_bits(rng()) < rho;
          const GroupElement y = resample ? draw() : x;
          w = factor.multiply(w, x);
          wp = factor.multiply(wp, y);
        }
        counts[PairKey{w, wp}] += 1;
      }
    }

    // Sample-split lower bound: A is chosen from the first half, evaluated on
    // the second, so E[P2(A) - Q(A)] = pi(A) - Q(A) <= TV.
    double p2_mass = 0.0, q_mass = 0.0;
    for (const auto& [key, c1] : counts1) {
      const double q = mu_n.weight(key.a) * mu_n.weight(key.b);
      if (static_cast<double>(c1) / half > q) {
        const auto it = counts2.find(key);
        if (it != counts2.end()) p2_mass += static_cast<double>(it->second) / half;
        q_mass += q;
      }
    }
    NsCell cell;
    cell.rho = rho;
    cell.n = n;
    cell.samples = 2 * half;
    cell.tv = std::max(0.0, p2_mass - q_mass);
    cell.std_error = std::sqrt(std::max(p2_mass * (1.0 - p2_mass), 1e-12) / half);
    cell.normalized = cell.tv * ns_normalizer(n, 2 * factor.rank());
    cell.seconds = cell_time.seconds();
    out.push_back(cell);
  }
}

}  // namespace

NsResult ns_curve(const Group& factor, const NsConfig& cfg) {
  validate_ns_config(factor, cfg);
  NsResult result;
  result.pair_rank = 2 * factor.rank();

  std::vector<std::vector<NsCell>> per_rho(cfg.rho.size());
  if (cfg.mode == NsMode::kExact) {
    const Group pair = Group::product(factor, factor);
    parallel_for(cfg.rho.size(), cfg.jobs, [&](std::size_t i) {
      exact_cells(factor, pair, cfg, cfg.rho[i], per_rho[i]);
    });
  } else {
    parallel_for(cfg.rho.size(), cfg.jobs, [&](std::size_t i) {
      monte_carlo_cells(factor, cfg, cfg.rho[i], static_cast<int>(i), per_rho[i]);
    });
  }
  for (auto& cells : per_rho)
    for (auto& c : cells) result.cells.push_back(c);
  return result;
}

SigmaRhoReport sigma_rho_invariance(const Group& factor, const Measure& mu,
                                    const std::vector<double>& rhos) {
  if (!(mu.weight(factor.identity()) > 0.0))
    throw std::invalid_argument("sigma_rho_invariance: mu must be lazy");
  for (const auto& [g, w] : mu.atoms)
    if (!factor.is_identity(g) && !factor.is_identity(factor.multiply(g, g)))
      throw std::invalid_argument("sigma_rho_invariance: supp mu must consist of involutions");

  SigmaRhoReport report;
  report.sigma_mu = covariance(build_network(factor, mu)).mat;
  const int m = factor.rank();
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  target.topLeftCorner(m, m) = report.sigma_mu;
  target.bottomRightCorner(m, m) = report.sigma_mu;

  const Group pair = Group::product(factor, factor);
  for (double rho : rhos) {
    if (!(rho > 0.0) || rho > 1.0)
      throw RhoOutOfRange("sigma_rho_invariance: rho must lie in (0, 1]");
    const Covariance sr = covariance(build_network(pair, noised_pair(mu, rho, pair)));
    const double dev = (sr.mat - target).cwiseAbs().maxCoeff();
    report.devs.emplace_back(rho, dev);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

double ZmResult::tv_at(double rho, int n) const {
  for (const auto& c : cells)
    if (c.n == n && std::abs(c.rho - rho) < 1e-12) return c.tv;
  throw std::out_of_range("zm_study: no cell for the requested (rho, n)");
}

ZmResult zm_study(const zl::ZAtoms& atoms, const std::vector<double>& rhos,
                  const std::vector<int>& ns, unsigned jobs) {
  zl::validate_symmetric_lazy_generating(atoms);
  ZmResult result;
  std::vector<std::vector<ZmCell>> per_rho(rhos.size());
  parallel_for(rhos.size(), jobs, [&](std::size_t i) {
    const double rho = rhos[i];
    for (int n : ns) {
      ZmCell cell;
      cell.rho = rho;
      cell.n = n;
      if (rho == 1.0) {
        cell.tv = 0.0;  // pi^1_n = mu_n x mu_n identically
      } else {
        const zl::DensePair pair = zl::pair_distribution_dft(atoms, rho, n);
        const zl::Dense1D mu_n = zl::power_1d(atoms, n);
        cell.tv = zl::pair_tv_vs_product(pair, mu_n);
      }
      per_rho[i].push_back(cell);
    }
  });
  for (auto& cells : per_rho)
    for (auto& c : cells) result.cells.push_back(c);
  return result;
}

ZmResult zm_study_general(int m, const std::vector<std::pair<IntVec, double>>& atoms,
                          const std::vector<double>& rhos, const std::vector<int>& ns,
                          std::size_t support_cap) {
  // Shares validation with the network module: build_network enforces symmetry
  // and that the support generates Z^m.
  const Group z = Group::free_abelian(m);
  const Group zpair = Group::free_abelian(2 * m);

  std::vector<std::pair<GroupElement, double>> elems;
  for (const auto& [t, w] : atoms) {
    GroupElement e = z.identity();
    e.t = t;
    elems.emplace_back(e, w);
  }
  const Measure mu = measure_from_atoms(z, std::move(elems));
  if (!(mu.weight(z.identity()) > 0.0))
    throw std::invalid_argument("zm_study_general: step law must be lazy");
  build_network(z, mu);  // validation only

  ZmResult result;
  for (double rho : rhos) {
    const Measure pi = noised_pair(mu, rho, zpair);
    for (int n : ns) {
      ZmCell cell;
      cell.rho = rho;
      cell.n = n;
      if (rho == 1.0) {
        cell.tv = 0.0;
      } else {
        const Measure walk = power(pi, n, support_cap);
        const Measure mu_n = power(mu, n, support_cap);
        cell.tv = tv_distance(walk, product_measure(mu_n, mu_n, zpair));
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

TailReport tail_bound_check(const Group& group, const Measure& mu, int n,
                            std::vector<int> r_grid) {
  if (!(mu.weight(group.identity()) > 0.0))
    throw std::invalid_argument("tail_bound_check: mu must be lazy");
  const Measure mu_n = power(mu, n);
  Ball ball = group.ball(n);

  // Tail mass by word norm.
  std::vector<double> mass_at(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& [x, w] : mu_n.atoms) {
    const auto idx = ball.find(x);
    if (!idx) throw std::runtime_error("tail_bound_check: support escaped ball(n)");
    mass_at[static_cast<std::size_t>(ball.norm[*idx])] += w;
  }
  std::vector<double> tail(static_cast<std::size_t>(n) + 2, 0.0);
  for (int r = n; r >= 0; --r)
    tail[static_cast<std::size_t>(r)] = tail[static_cast<std::size_t>(r) + 1] +
                                        mass_at[static_cast<std::size_t>(r)];

  if (r_grid.empty()) {
    const int step = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
    for (int r = 0; r <= n; r += step) r_grid.push_back(r);
  }

  TailReport report;
  for (int r : r_grid) {
    TailRow row;
    row.r = r;
    row.prob = r <= n ? tail[static_cast<std::size_t>(r)] : 0.0;
    row.r2_over_n = static_cast<double>(r) * r / n;
    row.log_prob = row.prob > 0.0 ? std::log(row.prob) : -std::numeric_limits<double>::infinity();
    report.rows.push_back(row);
  }

  // Least-squares fit of log prob against r^2/n over the genuine tail rows.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int count = 0;
  for (const auto& row : report.rows) {
    if (!(row.prob > 1e-300) || row.prob >= 1.0 || row.r * row.r < n) continue;
    sx += row.r2_over_n;
    sy += row.log_prob;
    sxx += row.r2_over_n * row.r2_over_n;
    sxy += row.r2_over_n * row.log_prob;
    syy += row.log_prob * row.log_prob;
    ++count;
  }
  if (count >= 3) {
    const double den = count * sxx - sx * sx;
    report.slope = (count * sxy - sx * sy) / den;
    report.intercept = (sy - report.slope * sx) / count;
    const double ss_tot = syy - sy * sy / count;
    double ss_res = 0.0;
    for (const auto& row : report.rows) {
      if (!(row.prob > 1e-300) || row.prob >= 1.0 || row.r * row.r < n) continue;
      const double pred = report.intercept + report.slope * row.r2_over_n;
      ss_res += (row.log_prob - pred) * (row.log_prob - pred);
    }
    report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return report;
}

std::vector<LcltRow> lclt_study(const Group& group, const Measure& mu, const Covariance& sigma,
                                const std::vector<int>& ns) {
  std::vector<LcltRow> rows;
  const int m = group.rank();
  for (int n : ns) {
    LcltRow row;
    row.n = n;
    row.sup_error = lclt_sup_error(group, mu, sigma, n);
    row.tv_error = lclt_tv_error(group, mu, sigma, n);
    row.sup_normalized = std::pow(static_cast<double>(n), 0.5 * (m + 1)) * row.sup_error;
    row.tv_normalized = std::sqrt(static_cast<double>(n)) * row.tv_error /
                        std::pow(std::log(static_cast<double>(n)), 0.5 * m);
    rows.push_back(row);
  }
  return rows;
}

namespace {

void append17(std::ostringstream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

std::string ns_to_csv(const NsResult& result, const std::string& group_name, double lazy,
                      NsMode mode, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("ns-curve");
  os << "group,lazy,rho,n,tv,normalized,mode,samples,stderr,seconds\n";
  for (const auto& c : result.cells) {
    os << group_name << ',';
    append17(os, lazy);
    os << ',';
    append17(os, c.rho);
    os << ',' << c.n << ',';
    append17(os, c.tv);
    os << ',';
    append17(os, c.normalized);
    os << ',' << (mode == NsMode::kExact ? "exact" : "monte-carlo") << ',' << c.samples << ',';
    append17(os, c.std_error);
    os << ',';
    append17(os, c.seconds);
    os << '\n';
  }
  return os.str();
}

std::string zm_to_csv(const ZmResult& result, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("zm-study");
  os << "rho,n,tv\n";
  for (const auto& c : result.cells) {
    append17(os, c.rho);
    os << ',' << c.n << ',';
    append17(os, c.tv);
    os << '\n';
  }
  return os.str();
}

std::string tail_to_csv(const TailReport& report, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("tail-check");
  os << "r,prob,log_prob,r2_over_n\n";
  for (const auto& row : report.rows) {
    os << row.r << ',';
    append17(os, row.prob);
    os << ',';
    append17(os, row.log_prob);
    os << ',';
    append17(os, row.r2_over_n);
    os << '\n';
  }
  return os.str();
}

std::string lclt_to_csv(const std::vector<LcltRow>& rows, bool timestamp_header) {
  std::ostringstream os;
  if (timestamp_header) os << timestamp_line("lclt-study");
  os << "n,sup_error,tv_error,sup_normalized,tv_normalized\n";
  for (const auto& row : rows) {
    os << row.n << ',';
    append17(os, row.sup_error);
    os << ',';
    append17(os, row.tv_error);
    os << ',';
    append17(os, row.sup_normalized);
    os << ',';
    append17(os, row.tv_normalized);
    os << '\n';
  }
  return os.str();
}

}  // namespace wrw
