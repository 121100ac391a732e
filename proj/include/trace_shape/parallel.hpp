#pragma once

namespace trace_shape {

/// Worker count for the concurrent outer loops (center sweeps and
/// finite-difference stencils). Element kernels follow the OpenMP default.
int worker_threads();
void set_worker_threads(int threads);

}  // namespace trace_shape
