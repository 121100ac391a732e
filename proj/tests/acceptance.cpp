#include <algorithm>
#include <iostream>

#include "trace_shape/acceptance.hpp"

int main() {
  const auto results = trace_shape::run_acceptance();
  trace_shape::print_acceptance(results, std::cout);
  const bool ok =
      std::all_of(results.begin(), results.end(), [](const trace_shape::CriterionResult& r) { return r.passed; });
  return ok ? 0 : 1;
}
