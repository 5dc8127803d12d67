#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wrw {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // gate it is compared against
  std::string detail;
  double seconds = 0.0;
};

// Runs the full acceptance suite (ten criteria). Each criterion pins its own
// tolerances; nothing is deferred to runtime configuration.
std::vector<CheckResult> run_acceptance(unsigned jobs = 1);

bool all_passed(const std::vector<CheckResult>& results);
void print_acceptance(const std::vector<CheckResult>& results, std::ostream& os);
std::string acceptance_to_json(const std::vector<CheckResult>& results);

}  // namespace wrw
