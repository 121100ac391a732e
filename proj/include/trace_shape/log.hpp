#pragma once

#include <spdlog/spdlog.h>

namespace trace_shape {

/// Library logger. Level comes from TRACE_SHAPE_LOG (error|info|debug),
/// defaulting to warnings only.
spdlog::logger& log();

}  // namespace trace_shape
