#include "trace_shape/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace trace_shape {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* env = std::getenv("TRACE_SHAPE_LOG");
  if (env == nullptr) return spdlog::level::warn;
  const std::string_view value(env);
  if (value == "debug") return spdlog::level::debug;
  if (value == "info") return spdlog::level::info;
  if (value == "error") return spdlog::level::err;
  return spdlog::level::warn;
}

}  // namespace

spdlog::logger& log() {
  static const std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("trace_shape");
    l->set_level(level_from_env());
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *logger;
}

}  // namespace trace_shape
