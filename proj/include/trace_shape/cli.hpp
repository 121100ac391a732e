#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trace_shape::cli {

/// Batch front end. Subcommands: radial, sp-curve, threshold, solve2d,
/// shape-derivative, sweep-center, optimize-center, check. Flags:
/// --config <path> --out <dir> --format csv|json --threads <k> --seed <n>.
/// Returns 0 on success, 2 on validation errors (including bad usage) and 3
/// on solver failures or failed acceptance criteria.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace trace_shape::cli
