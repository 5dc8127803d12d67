#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "wrw/group.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "/tmp/weylwalk_cli_out.txt";
  const std::string cmd = std::string(WEYLWALK_BIN) + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("unknown subcommand exits with code 1") {
  RunResult r = run_cli("badcommand");
  CHECK(r.exit_code == 1);
}

TEST_CASE("covariance on the A1xA1 pair prints diag(1/6)") {
  RunResult r = run_cli("covariance --group A1xA1 --lazy 0.3333333333 --no-timestamp");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.1666666") != std::string::npos);
}

TEST_CASE("ns-curve at rho 1 reports a zero tv column") {
  RunResult r = run_cli("ns-curve --group A1 --lazy 0.3333333333 --rho 1.0 --n 64 --no-timestamp");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find(",64,0,0,exact") != std::string::npos);
}

TEST_CASE("group-info reports the quotient layout") {
  RunResult r = run_cli("group-info --group A2 --ball 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("weyl_order 6") != std::string::npos);
  CHECK(r.output.find("network_vertices 6") != std::string::npos);
  CHECK(r.output.find("reversibility_violation 0") != std::string::npos);
}

TEST_CASE("convolve output is byte-identical without the timestamp header") {
  const std::string a = "/tmp/weylwalk_conv_a.csv", b = "/tmp/weylwalk_conv_b.csv";
  CHECK(run_cli("convolve --group A1 --lazy 0.4 --n 5 --no-timestamp --out " + a).exit_code == 0);
  CHECK(run_cli("convolve --group A1 --lazy 0.4 --n 5 --no-timestamp --out " + b).exit_code == 0);
  const std::string ca = slurp(a), cb = slurp(b);
  CHECK(!ca.empty());
  CHECK(ca == cb);
  CHECK(ca.find("element,weight") == 0);

  RunResult with_ts = run_cli("convolve --group A1 --lazy 0.4 --n 2");
  CHECK(with_ts.output.rfind("# weylwalk", 0) == 0);
}

TEST_CASE("validation errors exit with code 1") {
  CHECK(run_cli("convolve --group A1 --lazy 1.5 --n 3").exit_code == 1);
  CHECK(run_cli("covariance --group A1 --rho 0.5").exit_code == 1);
  CHECK(run_cli("ns-curve --group A1 --rho 0.0 --n 8").exit_code == 1);
  CHECK(run_cli("zm-study --atoms 2:0.5,-2:0.5 --rho 0.5 --n 10").exit_code == 1);
}

TEST_CASE("group spec files round-trip through the CLI") {
  const std::string path = "/tmp/weylwalk_c2.json";
  wrw::save_group_spec(wrw::Group::builtin_spec("C2"), path);
  RunResult r = run_cli("group-info --group " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("weyl_order 8") != std::string::npos);
}

TEST_CASE("weights flag drives non-uniform measures") {
  RunResult r = run_cli("covariance --group A1 --weights id=0.2,s1=0.5,s2=0.3 --no-timestamp");
  CHECK(r.exit_code == 0);
  // pq/(p+q) = 0.15/0.8
  CHECK(r.output.find("0.1875") != std::string::npos);
}

TEST_CASE("zm-study emits the tv table") {
  RunResult r = run_cli("zm-study --lazy 0.5 --rho 0.5 --n 50 --no-timestamp");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("rho,n,tv") == 0);
  CHECK(r.output.find("0.5,50,") != std::string::npos);
}

TEST_CASE("spectral scan and tail check run end to end") {
  RunResult scan = run_cli("spectral-scan --group A1 --lazy 0.3333333333 --no-timestamp");
  CHECK(scan.exit_code == 0);
  CHECK(scan.output.find("max_radius") != std::string::npos);

  RunResult tail = run_cli("tail-check --group A1 --lazy 0.3333333333 --n 64 --no-timestamp");
  CHECK(tail.exit_code == 0);
  CHECK(tail.output.find("r,prob,log_prob,r2_over_n") == 0);
  CHECK(tail.output.find("# slope -") != std::string::npos);
}

TEST_CASE("hessian-check reports derivative magnitudes") {
  RunResult r = run_cli("hessian-check --group A1 --lazy 0.3333333333");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("max_rel_error") != std::string::npos);
}
