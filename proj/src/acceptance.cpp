#include "wrw/acceptance.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "wrw/experiments.hpp"
#include "wrw/util.hpp"

namespace wrw {

namespace {

GroupElement named_gen(const Group& g, const std::string& name) {
  for (std::size_t i = 0; i < g.generator_names().size(); ++i)
    if (g.generator_names()[i] == name) return g.generator_elements()[i];
  throw std::runtime_error("no generator named " + name);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Factor-2 band around the median: max over the sequence of el/med and med/el.
double band_ratio(const std::vector<double>& seq) {
  std::vector<double> sorted = seq;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[sorted.size() / 2];
  double worst = 1.0;
  for (double v : seq) worst = std::max(worst, std::max(v / med, med / v));
  return worst;
}

// 1. Covariance regressions against the four closed-form values.
CheckResult check_covariance() {
  Stopwatch timer;
  CheckResult res;
  res.name = "covariance_regressions";
  res.threshold = 1e-10;
  double worst = 0.0;

  Group a1 = Group::builtin("A1");
  Group pair = Group::builtin("A1xA1");
  for (double a : {0.2, 1.0 / 3.0, 0.6}) {
    for (double rho : {0.5, 1.0}) {
      const Covariance s =
          covariance(build_network(pair, noised_pair(lazy_uniform(a1, a), rho, pair)));
      Eigen::MatrixXd want = (1.0 - a) / 4.0 * Eigen::MatrixXd::Identity(2, 2);
      worst = std::max(worst, (s.mat - want).cwiseAbs().maxCoeff());
    }
    {
      const double p = 0.6 * (1.0 - a), q = 0.4 * (1.0 - a);
      Measure mu = measure_from_atoms<double>(a1, {{a1.identity(), a},
                                                   {named_gen(a1, "s1"), p},
                                                   {named_gen(a1, "s2"), q}});
      const Covariance s = covariance(build_network(pair, noised_pair(mu, 0.5, pair)));
      Eigen::MatrixXd want = p * q / (p + q) * Eigen::MatrixXd::Identity(2, 2);
      worst = std::max(worst, (s.mat - want).cwiseAbs().maxCoeff());
    }
    {
      Group a2 = Group::builtin("A2");
      const Covariance s = covariance(build_network(a2, lazy_uniform(a2, a)));
      Eigen::MatrixXd want = std::sqrt(3.0) / 27.0 * (1.0 - a) * Eigen::MatrixXd::Identity(2, 2);
      worst = std::max(worst, (s.mat - want).cwiseAbs().maxCoeff());
    }
    {
      Group c2 = Group::builtin("C2");
      const Covariance s = covariance(build_network(c2, lazy_uniform(c2, a)));
      Eigen::MatrixXd want = (1.0 - a) / 24.0 * Eigen::MatrixXd::Identity(2, 2);
      worst = std::max(worst, (s.mat - want).cwiseAbs().maxCoeff());
    }
  }
  res.value = worst;
  res.passed = worst < res.threshold;
  res.detail = "max |Sigma - closed form| over A1xA1 uniform/general, A2, C2; mu(id) in {0.2,1/3,0.6}";
  res.seconds = timer.seconds();
  return res;
}

// 2. Finite-difference Hessian against -4 pi^2 Sigma.
CheckResult check_hessian() {
  Stopwatch timer;
  CheckResult res;
  res.name = "hessian_identity";
  res.threshold = 1e-4;
  double worst_rel = 0.0, worst_first = 0.0, worst_third = 0.0;
  for (const char* name : {"A1", "A1xA1", "A2", "C2"}) {
    Group g = Group::builtin(name);
    QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
    const HessianReport rep = hessian_check(net, covariance(net));
    worst_rel = std::max(worst_rel, rep.max_rel_error);
    worst_first = std::max(worst_first, rep.max_first_derivative);
    worst_third = std::max(worst_third, rep.max_third_derivative);
  }
  res.value = worst_rel;
  res.passed = worst_rel < 1e-4 && worst_first < 1e-6 && worst_third < 1e-6;
  res.detail = "max first derivative " + fmt(worst_first) + ", max third derivative " +
               fmt(worst_third) + " (both gated at 1e-6)";
  res.seconds = timer.seconds();
  return res;
}

// 3. L^n_{v_hat} 1 (x0) against the characteristic function of mu_n.
CheckResult check_transfer_char() {
  Stopwatch timer;
  CheckResult res;
  res.name = "transfer_character_identity";
  res.threshold = 1e-10;
  double worst = 0.0;
  std::mt19937_64 rng(20240817);
  for (const char* name : {"A1", "A2"}) {
    Group g = Group::builtin(name);
    Measure mu = lazy_uniform(g, 1.0 / 3.0);
    QuotientNetwork net = build_network(g, mu);
    const Eigen::MatrixXd dual = dual_basis(g);
    Measure walk = delta_identity<double>(g);
    int k = 0;
    for (int n : {10, 50, 200}) {
      for (; k < n; ++k) walk = convolve(walk, mu);
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd r(g.rank());
        for (int i = 0; i < g.rank(); ++i) r[i] = u01_from_bits(rng()) - 0.5;
        const Eigen::VectorXd v = dual * r;
        worst = std::max(worst, std::abs(char_function(g, walk, v) - transfer_char(net, v, n)));
      }
    }
  }
  res.value = worst;
  res.passed = worst < res.threshold;
  res.detail = "20 random v per n in {10,50,200} on A1 and A2";
  res.seconds = timer.seconds();
  return res;
}

// 4. Spectral gap over the 64-per-axis grid on D \ D_0.05.
CheckResult check_spectral_gap() {
  Stopwatch timer;
  CheckResult res;
  res.name = "spectral_gap";
  res.threshold = 1.0 - 1e-3;
  double worst = 0.0;
  std::string where;
  for (const char* name : {"A1", "A1xA1", "A2", "C2"}) {
    Group g = Group::builtin(name);
    QuotientNetwork net = build_network(g, lazy_uniform(g, 1.0 / 3.0));
    SpectralScanConfig cfg;  // delta = 0.05, grid = 64
    const ScanResult scan = spectral_scan(net, cfg);
    if (scan.max_radius > worst) {
      worst = scan.max_radius;
      where = name;
    }
  }
  res.value = worst;
  res.passed = worst < res.threshold;
  res.detail = "max |lambda| attained on " + where + "; implied c_delta " + fmt(-std::log(worst));
  res.seconds = timer.seconds();
  return res;
}

// 5. LCLT scaling bands on A1 with a non-uniform lazy measure. (The uniform
// walk makes Phi harmonic and beats the stated rates, which would drift the
// normalized sequences; the generic measure pins the generic rates.)
CheckResult check_lclt_scaling() {
  Stopwatch timer;
  CheckResult res;
  res.name = "lclt_scaling";
  res.threshold = 2.0;
  Group a1 = Group::builtin("A1");
  const double a = 1.0 / 3.0, p = 0.4, q = 1.0 - a - p;
  Measure mu = measure_from_atoms<double>(
      a1, {{a1.identity(), a}, {named_gen(a1, "s1"), p}, {named_gen(a1, "s2"), q}});
  const Covariance sigma = covariance(build_network(a1, mu));
  const auto rows = lclt_study(a1, mu, sigma, {50, 100, 200, 400, 800});
  std::vector<double> sup_seq, tv_seq;
  for (const auto& row : rows) {
    sup_seq.push_back(row.sup_normalized);
    tv_seq.push_back(row.tv_normalized);
  }
  res.value = std::max(band_ratio(sup_seq), band_ratio(tv_seq));
  res.passed = res.value < res.threshold;
  std::ostringstream os;
  os << "n^{(m+1)/2} sup: ";
  for (double v : sup_seq) os << fmt(v) << ' ';
  os << "| sqrt(n)/(log n)^{m/2} tv: ";
  for (double v : tv_seq) os << fmt(v) << ' ';
  res.detail = os.str();
  res.seconds = timer.seconds();
  return res;
}

// 6. Exact noise-sensitivity table on A1. The normalized column checks the
// bound shape: no upward drift past a factor 2 of its starting value. (The
// measured TV in fact decays like 1/n — strictly inside the (log n)^2/sqrt(n)
// envelope — so a two-sided band around the median cannot apply here.)
CheckResult check_noise_sensitivity(unsigned jobs) {
  Stopwatch timer;
  CheckResult res;
  res.name = "noise_sensitivity";
  res.threshold = 2.0;
  Group a1 = Group::builtin("A1");
  NsConfig cfg;
  cfg.lazy = 1.0 / 3.0;
  cfg.rho = {0.1, 0.3, 1.0};
  cfg.n = {32, 64, 128, 256};
  cfg.jobs = jobs;
  const NsResult table = ns_curve(a1, cfg);

  bool ok = true;
  double worst_drift = 1.0;
  std::ostringstream os;
  for (std::size_t r = 0; r < cfg.rho.size(); ++r) {
    std::vector<double> tvs, normalized;
    for (std::size_t i = 0; i < cfg.n.size(); ++i) {
      const NsCell& c = table.cells[r * cfg.n.size() + i];
      tvs.push_back(c.tv);
      normalized.push_back(c.normalized);
    }
    os << "rho=" << cfg.rho[r] << " tv: ";
    for (double tv : tvs) os << fmt(tv) << ' ';
    if (cfg.rho[r] == 1.0) {
      for (double tv : tvs) ok = ok && tv <= 1e-14;
    } else {
      os << "| n*tv: ";
      for (std::size_t i = 0; i < tvs.size(); ++i) os << fmt(tvs[i] * cfg.n[i]) << ' ';
      for (std::size_t i = 1; i < tvs.size(); ++i) ok = ok && tvs[i] < tvs[i - 1];
      for (double v : normalized) worst_drift = std::max(worst_drift, v / normalized.front());
    }
  }
  res.value = worst_drift;
  res.passed = ok && worst_drift < res.threshold;
  res.detail = os.str() + (ok ? "" : "| monotonicity or rho=1 exactness failed");
  res.seconds = timer.seconds();
  return res;
}

// 7. Sigma^rho block-diagonal invariance on the A1 and A2 pairs.
CheckResult check_sigma_rho() {
  Stopwatch timer;
  CheckResult res;
  res.name = "sigma_rho_invariance";
  res.threshold = 1e-10;
  const std::vector<double> rhos = {0.1, 0.25, 0.5, 0.75, 1.0};
  double worst = 0.0;
  for (const char* name : {"A1", "A2"}) {
    Group g = Group::builtin(name);
    const SigmaRhoReport rep = sigma_rho_invariance(g, lazy_uniform(g, 1.0 / 3.0), rhos);
    worst = std::max(worst, rep.max_deviation);
  }
  res.value = worst;
  res.passed = worst < res.threshold;
  res.detail = "rho in {0.1,0.25,0.5,0.75,1.0}, lazy uniform 1/3";
  res.seconds = timer.seconds();
  return res;
}

// 8. Appendix study on Z at n = 2000.
CheckResult check_zm(unsigned jobs) {
  Stopwatch timer;
  CheckResult res;
  res.name = "zm_appendix";
  const double lazy = 1.0 / 3.0;
  const zl::ZAtoms atoms = {{-1, (1 - lazy) / 2}, {0, lazy}, {1, (1 - lazy) / 2}};
  const std::vector<double> rhos = {0.01, 0.25, 0.5, 0.75, 0.99};
  const int n = 2000;
  const ZmResult table = zm_study(atoms, rhos, {n}, jobs);

  const double lower = 1.0 - 2.0 * std::pow(0.01, 0.25) - 0.05;
  const double tv_small_rho = table.tv_at(0.01, n);
  const double tv_large_rho = table.tv_at(0.99, n);
  bool monotone = true;
  double prev = 2.0;
  std::ostringstream os;
  for (double rho : rhos) {
    const double tv = table.tv_at(rho, n);
    monotone = monotone && tv <= prev + 1e-12;
    prev = tv;
    os << "tv(" << rho << ")=" << fmt(tv) << ' ';
  }
  res.value = tv_small_rho;
  res.threshold = lower;
  res.passed = tv_small_rho >= lower && tv_large_rho < 0.1 && monotone;
  res.detail = os.str() + "| need tv(0.01) >= " + fmt(lower) + ", tv(0.99) < 0.1, non-increasing";
  res.seconds = timer.seconds();
  return res;
}

// 9. Rational-mode oracle equivalence: full path enumeration.
CheckResult check_oracle() {
  Stopwatch timer;
  CheckResult res;
  res.name = "oracle_equivalence";
  res.threshold = 0.0;
  Group a1 = Group::builtin("A1");
  Group pair = Group::product(a1, a1);
  const RationalMeasure mu = lazy_uniform_t<Rat>(a1, Rat(1, 3));
  const RationalMeasure pi = noised_pair(mu, Rat(1, 2), pair);

  // Independent oracle: enumerate every increment sequence.
  auto enumerate = [](const Group& g, const RationalMeasure& step, int n) {
    std::map<GroupElement, Rat> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      GroupElement cur = g.identity();
      Rat w(1);
      for (int i = 0; i < n; ++i) {
        const auto& [e, we] = step.atoms[idx[static_cast<std::size_t>(i)]];
        cur = g.multiply(cur, e);
        w *= we;
      }
      out[cur] += w;
      int pos = n - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == step.atoms.size()) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    if (n == 0) out[g.identity()] = Rat(1);
    return out;
  };

  long mismatches = 0;
  for (int n = 0; n <= 6; ++n) {
    const auto oracle_mu = enumerate(a1, mu, n);
    const RationalMeasure mun = power(mu, n);
    if (oracle_mu.size() != mun.atoms.size()) ++mismatches;
    for (const auto& [e, w] : oracle_mu)
      if (mun.weight(e) != w) ++mismatches;

    const auto oracle_pi = enumerate(pair, pi, n);
    const RationalMeasure pin = power(pi, n);
    if (oracle_pi.size() != pin.atoms.size()) ++mismatches;
    for (const auto& [e, w] : oracle_pi)
      if (pin.weight(e) != w) ++mismatches;
  }
  res.value = static_cast<double>(mismatches);
  res.passed = mismatches == 0;
  res.detail = "power(mu,n) and pi^{1/2}_n vs full enumeration, n <= 6, exact rationals";
  res.seconds = timer.seconds();
  return res;
}

// 10. Sharpness probe on Z: n * TV stays in a fixed positive bracket.
CheckResult check_sharpness() {
  Stopwatch timer;
  CheckResult res;
  res.name = "sharpness_probe";
  res.threshold = 10.0;
  Group z = Group::free_abelian(1);
  GroupElement plus = z.identity(), minus = z.identity();
  plus.t[0] = 1;
  minus.t[0] = -1;
  const double lazy = 1.0 / 3.0;
  Measure mu = measure_from_atoms<double>(
      z, {{z.identity(), lazy}, {plus, (1 - lazy) / 2}, {minus, (1 - lazy) / 2}});
  const Covariance sigma = covariance(build_network(z, mu));
  std::vector<double> scaled;
  std::ostringstream os;
  for (int n : {100, 200, 400, 800, 1600}) {
    scaled.push_back(n * lclt_tv_error(z, mu, sigma, n));
    os << fmt(scaled.back()) << ' ';
  }
  const double lo = *std::min_element(scaled.begin(), scaled.end());
  const double hi = *std::max_element(scaled.begin(), scaled.end());
  res.value = hi / lo;
  res.passed = lo > 0.0 && res.value < res.threshold;
  res.detail = "n * TV(mu_n, N^Phi_{n Sigma}): " + os.str();
  res.seconds = timer.seconds();
  return res;
}

}  // namespace

std::vector<CheckResult> run_acceptance(unsigned jobs) {
  std::vector<CheckResult> results;
  results.push_back(check_covariance());
  results.push_back(check_hessian());
  results.push_back(check_transfer_char());
  results.push_back(check_spectral_gap());
  results.push_back(check_lclt_scaling());
  results.push_back(check_noise_sensitivity(jobs));
  results.push_back(check_sigma_rho());
  results.push_back(check_zm(jobs));
  results.push_back(check_oracle());
  results.push_back(check_sharpness());
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

void print_acceptance(const std::vector<CheckResult>& results, std::ostream& os) {
  for (const auto& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  value=" << fmt(r.value)
       << " threshold=" << fmt(r.threshold) << "  [" << fmt(r.seconds) << "s]\n";
    if (!r.detail.empty()) os << "      " << r.detail << '\n';
  }
}

std::string acceptance_to_json(const std::vector<CheckResult>& results) {
  nlohmann::json j;
  for (const auto& r : results)
    j[r.name] = {{"passed", r.passed}, {"value", r.value}, {"threshold", r.threshold}};
  return j.dump(2);
}

}  // namespace wrw
