#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrw/gauss.hpp"
#include "wrw/transfer.hpp"
#include "wrw/zlattice.hpp"

namespace wrw {

struct RhoZeroInExactNS : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NsMode { kExact, kMonteCarlo };

struct NsConfig {
  double lazy = 1.0 / 3.0;
  std::vector<double> rho;
  std::vector<int> n;  // ascending
  NsMode mode = NsMode::kExact;
  long samples = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool allow_rho_zero = false;   // rho = 0 only for the diagonal-degeneracy demo
  bool allow_large_rank = false; // rank-2 factors (rank-4 pairs) behind a flag
  std::size_t support_cap = kDefaultSupportCap;
};

struct NsCell {
  double rho = 0.0;
  int n = 0;
  double tv = 0.0;
  double normalized = 0.0;  // tv sqrt(n) / (log n)^{pair rank}
  double std_error = 0.0;   // Monte Carlo only
  long samples = 0;         // Monte Carlo only
  double seconds = 0.0;
};

struct NsResult {
  int pair_rank = 0;
  std::vector<NsCell> cells;  // rho-major, n ascending within
};

// TV(pi^rho_n, mu_n x mu_n) on the product group. Exact mode convolves pi^rho
// on Gamma x Gamma and builds mu_n x mu_n from two factor convolutions; at
// rho = 1 the two laws coincide identically (independence), reported as 0.
// Monte Carlo mode couples the two walks by per-step Bernoulli(rho)
// resampling and reports a sample-split TV lower-bound estimator.
NsResult ns_curve(const Group& factor, const NsConfig& cfg);

struct SigmaRhoReport {
  Eigen::MatrixXd sigma_mu;                   // factor covariance
  std::vector<std::pair<double, double>> devs;  // (rho, deviation)
  double max_deviation = 0.0;
};

// max_rho || Sigma^rho - blockdiag(Sigma^mu, Sigma^mu) ||_inf.
SigmaRhoReport sigma_rho_invariance(const Group& factor, const Measure& mu,
                                    const std::vector<double>& rhos);

struct ZmCell {
  double rho = 0.0;
  int n = 0;
  double tv = 0.0;
};

struct ZmResult {
  std::vector<ZmCell> cells;
  double tv_at(double rho, int n) const;
};

// Exact TV table for the noised pair of a lazy symmetric walk on Z.
ZmResult zm_study(const zl::ZAtoms& atoms, const std::vector<double>& rhos,
                  const std::vector<int>& ns, unsigned jobs = 1);

// General-rank variant on Z^m through the sparse group pipeline; pair supports
// grow like n^{2m}, so the support cap is the feasibility gate.
ZmResult zm_study_general(int m, const std::vector<std::pair<IntVec, double>>& atoms,
                          const std::vector<double>& rhos, const std::vector<int>& ns,
                          std::size_t support_cap = kDefaultSupportCap);

struct TailRow {
  int r = 0;
  double prob = 0.0;
  double log_prob = 0.0;
  double r2_over_n = 0.0;
};

struct TailReport {
  std::vector<TailRow> rows;
  double slope = 0.0;      // of log prob against r^2/n over the tail rows
  double intercept = 0.0;
  double r_squared = 0.0;
};

TailReport tail_bound_check(const Group& group, const Measure& mu, int n,
                            std::vector<int> r_grid = {});

struct LcltRow {
  int n = 0;
  double sup_error = 0.0;
  double tv_error = 0.0;
  double sup_normalized = 0.0;  // n^{(m+1)/2} sup
  double tv_normalized = 0.0;   // sqrt(n) tv / (log n)^{m/2}
};

std::vector<LcltRow> lclt_study(const Group& group, const Measure& mu, const Covariance& sigma,
                                const std::vector<int>& ns);

std::string ns_to_csv(const NsResult& result, const std::string& group_name, double lazy,
                      NsMode mode, bool timestamp_header);
std::string zm_to_csv(const ZmResult& result, bool timestamp_header);
std::string tail_to_csv(const TailReport& report, bool timestamp_header);
std::string lclt_to_csv(const std::vector<LcltRow>& rows, bool timestamp_header);

}  // namespace wrw
