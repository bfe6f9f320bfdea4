#include "radfed/log.hpp"

#include <mutex>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace radfed {
namespace {

std::mutex& logger_mutex() {
    static std::mutex m;
    return m;
}

std::shared_ptr<spdlog::logger>& logger_slot() {
    static std::shared_ptr<spdlog::logger> slot = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
        auto created = std::make_shared<spdlog::logger>("radfed", std::move(sink));
        created->set_pattern("[%l] %v");
        created->set_level(spdlog::level::info);
        return created;
    }();
    return slot;
}

}  // namespace

spdlog::logger& logger() {
    std::lock_guard lock(logger_mutex());
    return *logger_slot();
}

void set_logger(std::shared_ptr<spdlog::logger> replacement) {
    std::lock_guard lock(logger_mutex());
    logger_slot() = std::move(replacement);
}

}  // namespace radfed
