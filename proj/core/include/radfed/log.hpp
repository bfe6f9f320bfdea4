#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace radfed {

/// Library-wide logger; warnings about dropped inputs and fallbacks go here.
spdlog::logger& logger();

/// Replaces the library logger (tests attach capturing sinks).
void set_logger(std::shared_ptr<spdlog::logger> replacement);

}  // namespace radfed
