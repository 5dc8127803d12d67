// weylwalk — random walks on affine Weyl groups: quotient networks, harmonic
// 1-forms, transfer-operator spectra, local CLT error studies, and the
// noise-sensitivity experiments. CSV/JSON emission throughout.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wrw/acceptance.hpp"
#include "wrw/experiments.hpp"
#include "wrw/util.hpp"

namespace {

using namespace wrw;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

// Measure from --lazy or an explicit --weights "id=0.2,s1=0.5,s2=0.3" list.
Measure build_measure(const Group& g, double lazy, const std::string& weights) {
  if (weights.empty()) return lazy_uniform(g, lazy);
  std::vector<std::pair<GroupElement, double>> atoms;
  std::stringstream ss(weights);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--weights entries must look like name=value");
    const std::string name = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (name == "id") {
      atoms.emplace_back(g.identity(), value);
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i < g.generator_names().size(); ++i)
      if (g.generator_names()[i] == name) {
        atoms.emplace_back(g.generator_elements()[i], value);
        found = true;
        break;
      }
    if (!found) throw std::invalid_argument("unknown generator in --weights: " + name);
  }
  Measure mu = measure_from_atoms(g, std::move(atoms));
  if (std::abs(mu.total_mass() - 1.0) > 1e-9)
    throw std::invalid_argument("--weights must sum to 1");
  return mu;
}

zl::ZAtoms parse_z_atoms(const std::string& spec_string, double lazy) {
  if (spec_string.empty())
    return {{-1, (1.0 - lazy) / 2.0}, {0, lazy}, {1, (1.0 - lazy) / 2.0}};
  zl::ZAtoms atoms;
  std::stringstream ss(spec_string);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--atoms entries must look like step:weight");
    atoms.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return atoms;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weylwalk: random walks on affine Weyl groups"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags override it");

  // Shared option storage.
  std::string group_name = "A1", out_path, weights, json_path, atoms_spec;
  double lazy = 1.0 / 3.0, rho_single = 1.0, delta = 0.05, step = 1e-3;
  std::vector<double> rhos;
  std::vector<int> ns;
  int n_single = 0, grid = 64, ball_radius = -1;
  long samples = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool no_timestamp = false, keep_points = false, allow_rho_zero = false,
       allow_large_rank = false, mc_mode = false;
  std::size_t cap = kDefaultSupportCap;

  auto add_common = [&](CLI::App* cmd, bool with_measure = true) {
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    cmd->add_flag("--no-timestamp", no_timestamp, "suppress the timestamp header line");
    if (with_measure) {
      cmd->add_option("--group", group_name, "built-in name (A1, A1xA1, A2, C2) or spec file");
      cmd->add_option("--lazy", lazy, "mu(id) for the lazy uniform measure");
      cmd->add_option("--weights", weights, "explicit atom weights, e.g. id=0.2,s1=0.5,s2=0.3");
    }
  };

  std::string network_out;
  auto* info = app.add_subcommand("group-info", "describe a group and its quotient network");
  add_common(info);
  info->add_option("--ball", ball_radius, "also report |B(r)| for this radius");
  info->add_option("--network-out", network_out, "write the edge table (origin, terminus, generator, p, c, Phi) as CSV");

  auto* conv = app.add_subcommand("convolve", "dump the n-step distribution mu_n as CSV");
  add_common(conv);
  conv->add_option("--n", n_single, "number of steps")->required();

  auto* cov = app.add_subcommand("covariance", "covariance matrix Sigma of the walk");
  add_common(cov);
  cov->add_option("--rho", rho_single,
                  "noise parameter for product built-ins (pair measure pi^rho)");

  auto* hess = app.add_subcommand("hessian-check", "finite-difference Hessian vs -4 pi^2 Sigma");
  add_common(hess);
  hess->add_option("--step", step, "finite difference step");

  auto* scan = app.add_subcommand("spectral-scan", "max |lambda| over the dual grid D \\ D_delta");
  add_common(scan);
  scan->add_option("--delta", delta, "excluded box half-width in dual coordinates");
  scan->add_option("--grid", grid, "grid points per axis");
  scan->add_flag("--points", keep_points, "emit one CSV row per grid point");

  auto* lclt = app.add_subcommand("lclt-study", "sup and TV errors against the discrete normal");
  add_common(lclt);
  lclt->add_option("--n", ns, "walk lengths")->required();

  auto* nsc = app.add_subcommand("ns-curve", "TV(pi^rho_n, mu_n x mu_n) noise-sensitivity table");
  add_common(nsc);
  nsc->add_option("--rho", rhos, "noise parameters")->required();
  nsc->add_option("--n", ns, "walk lengths (ascending)")->required();
  nsc->add_flag("--monte-carlo", mc_mode, "sampling estimator instead of exact convolution");
  nsc->add_option("--samples", samples, "Monte Carlo sample count");
  nsc->add_option("--seed", seed, "Monte Carlo seed");
  nsc->add_option("--jobs", jobs, "parallel rho cells");
  nsc->add_option("--cap", cap, "convolution support cap");
  nsc->add_flag("--allow-rho-zero", allow_rho_zero, "permit the diagonal-walk demo");
  nsc->add_flag("--allow-large-rank", allow_large_rank, "permit rank-2 factors (n <= 64)");

  auto* sig = app.add_subcommand("sigma-invariance", "Sigma^rho vs blockdiag(Sigma^mu, Sigma^mu)");
  add_common(sig);
  sig->add_option("--rho", rhos, "noise parameters")->required();

  auto* zm = app.add_subcommand("zm-study", "noised-pair TV table for a lazy walk on Z");
  add_common(zm, false);
  zm->add_option("--lazy", lazy, "laziness of the simple walk");
  zm->add_option("--atoms", atoms_spec, "custom step law, e.g. 0:0.4,1:0.3,-1:0.3");
  zm->add_option("--rho", rhos, "noise parameters")->required();
  zm->add_option("--n", ns, "walk lengths")->required();
  zm->add_option("--jobs", jobs, "parallel rho cells");

  auto* tail = app.add_subcommand("tail-check", "exact word-norm tails vs the Gaussian shape");
  add_common(tail);
  tail->add_option("--n", n_single, "walk length")->required();

  auto* self = app.add_subcommand("selftest", "run the full acceptance suite");
  self->add_option("--jobs", jobs, "parallel cells where applicable");
  self->add_option("--json", json_path, "write the {check: {passed, value, threshold}} summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const bool ts = !no_timestamp;
    if (info->parsed()) {
      Group g = resolve_group(group_name);
      std::ostringstream os;
      os << "group " << (g.spec().name.empty() ? group_name : g.spec().name) << "\n"
         << "rank " << g.rank() << "\n"
         << "weyl_order " << g.weyl_order() << "\n"
         << "covolume " << g.covolume() << "\n"
         << "generators " << g.generator_elements().size() << "\n";
      if (ball_radius >= 0)
        os << "ball_" << ball_radius << " " << g.ball(ball_radius).elems.size() << "\n";
      Measure mu = build_measure(g, lazy, weights);
      QuotientNetwork net = build_network(g, mu);
      os << "network_vertices " << net.num_vertices() << "\n"
         << "network_edges " << net.num_edges() << "\n"
         << "reversibility_violation " << check_reversibility(net).max_violation << "\n";
      if (!network_out.empty()) {
        std::ofstream net_file(network_out);
        if (!net_file) throw std::runtime_error("cannot write network file: " + network_out);
        net_file << network_to_csv(net, ts);
      }
      write_output(out_path, os.str());
    } else if (conv->parsed()) {
      Group g = resolve_group(group_name);
      Measure mu_n = power(build_measure(g, lazy, weights), n_single);
      write_output(out_path, measure_to_csv(mu_n, ts));
    } else if (cov->parsed()) {
      Group g = resolve_group(group_name);
      Covariance sigma;
      if (!g.spec().factors.empty()) {
        // Product built-in: --lazy/--weights describe the factor measure and
        // the pair carries pi^rho.
        Group factor = resolve_group(g.spec().factors[0]);
        Measure mu = build_measure(factor, lazy, weights);
        sigma = covariance(build_network(g, noised_pair(mu, rho_single, g)));
      } else {
        if (cov->count("--rho") > 0)
          throw std::invalid_argument("--rho only applies to product built-ins");
        sigma = covariance(build_network(g, build_measure(g, lazy, weights)));
      }
      write_output(out_path, covariance_to_csv(sigma, ts));
    } else if (hess->parsed()) {
      Group g = resolve_group(group_name);
      QuotientNetwork net = build_network(g, build_measure(g, lazy, weights));
      const HessianReport rep = hessian_check(net, covariance(net), step);
      std::ostringstream os;
      os << "max_rel_error " << rep.max_rel_error << "\n"
         << "max_first_derivative " << rep.max_first_derivative << "\n"
         << "max_third_derivative " << rep.max_third_derivative << "\n"
         << "step " << rep.step << "\n";
      write_output(out_path, os.str());
    } else if (scan->parsed()) {
      Group g = resolve_group(group_name);
      QuotientNetwork net = build_network(g, build_measure(g, lazy, weights));
      SpectralScanConfig cfg;
      cfg.delta = delta;
      cfg.grid = grid;
      cfg.keep_points = keep_points;
      const ScanResult result = spectral_scan(net, cfg);
      std::ostringstream os;
      os << scan_to_csv(result, ts);
      if (keep_points)
        os << "# max_radius " << result.max_radius << " c_delta " << result.c_delta << "\n";
      write_output(out_path, os.str());
    } else if (lclt->parsed()) {
      Group g = resolve_group(group_name);
      Measure mu = build_measure(g, lazy, weights);
      Covariance sigma = covariance(build_network(g, mu));
      write_output(out_path, lclt_to_csv(lclt_study(g, mu, sigma, ns), ts));
    } else if (nsc->parsed()) {
      Group g = resolve_group(group_name);
      NsConfig cfg;
      cfg.lazy = lazy;
      cfg.rho = rhos;
      cfg.n = ns;
      cfg.mode = mc_mode ? NsMode::kMonteCarlo : NsMode::kExact;
      cfg.samples = samples;
      cfg.seed = seed;
      cfg.jobs = jobs;
      cfg.allow_rho_zero = allow_rho_zero;
      cfg.allow_large_rank = allow_large_rank;
      cfg.support_cap = cap;
      write_output(out_path, ns_to_csv(ns_curve(g, cfg), group_name, lazy, cfg.mode, ts));
    } else if (sig->parsed()) {
      Group g = resolve_group(group_name);
      const SigmaRhoReport rep =
          sigma_rho_invariance(g, build_measure(g, lazy, weights), rhos);
      std::ostringstream os;
      os << "rho,deviation\n";
      for (const auto& [r, dev] : rep.devs) os << r << ',' << dev << '\n';
      os << "# max_deviation " << rep.max_deviation << "\n";
      write_output(out_path, os.str());
    } else if (zm->parsed()) {
      const ZmResult result = zm_study(parse_z_atoms(atoms_spec, lazy), rhos, ns, jobs);
      write_output(out_path, zm_to_csv(result, ts));
    } else if (tail->parsed()) {
      Group g = resolve_group(group_name);
      const TailReport rep = tail_bound_check(g, build_measure(g, lazy, weights), n_single);
      std::ostringstream os;
      os << tail_to_csv(rep, ts);
      os << "# slope " << rep.slope << " intercept " << rep.intercept << " r_squared "
         << rep.r_squared << "\n";
      write_output(out_path, os.str());
    } else if (self->parsed()) {
      const auto results = run_acceptance(jobs);
      print_acceptance(results, std::cout);
      if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("cannot write JSON summary: " + json_path);
        out << acceptance_to_json(results) << "\n";
      }
      return all_passed(results) ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
