#include "trace_shape/parallel.hpp"

#include <atomic>

#include <omp.h>

#include "trace_shape/errors.hpp"

namespace trace_shape {

namespace {

std::atomic<int> g_workers{0};

}  // namespace

int worker_threads() {
  const int w = g_workers.load();
  return w > 0 ? w : omp_get_max_threads();
}

void set_worker_threads(int threads) {
  if (threads < 1) throw TraceError(ErrorKind::ConfigError, "cli", "thread count must be >= 1");
  g_workers.store(threads);
}

}  // namespace trace_shape
