#include "wikimrc/util/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

namespace wikimrc {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("wikimrc");
    if (existing) return existing;
    auto l = spdlog::stderr_logger_mt("wikimrc");
    l->set_pattern("[%l] %v");
    return l;
  }();
  return instance;
}

}  // namespace wikimrc
