#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trace_shape {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;  // measured values and any failed sub-check
};

/// Runs the nine acceptance criteria in order. A criterion fails when any of
/// its checks fails, when it throws, or when it exceeds its time limit.
std::vector<CriterionResult> run_acceptance();

/// One line per criterion: "[PASS] 1 name (1.2 s / 5 s): detail".
void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace trace_shape
