#pragma once

#include <cstdlib>
#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace isp {

/// Library logger on stderr. Level comes from ISP_LOG
/// (trace, debug, info, warn, error, off); default warn.
inline spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::get("isp");
    if (!l) l = spdlog::stderr_color_mt("isp");
    const char* env = std::getenv("ISP_LOG");
    l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return l;
  }();
  return *instance;
}

}  // namespace isp
