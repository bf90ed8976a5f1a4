#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace wikimrc {

// Shared logger; always writes to standard error so data written to standard
// output stays clean.
std::shared_ptr<spdlog::logger> logger();

}  // namespace wikimrc
