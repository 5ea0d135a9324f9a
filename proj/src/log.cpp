#include "ctmine/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>

#include <json.hpp>

namespace ctmine::log {

namespace {

std::atomic<Level> g_min_level{Level::Info};
std::mutex g_mutex;

const char* level_name(Level l) {
    switch (l) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
    }
    return "info";
}

}  // namespace

void set_min_level(Level level) { g_min_level.store(level); }

void write(Level level, std::string_view msg,
           std::initializer_list<std::pair<std::string_view, std::string>> fields) {
    if (level < g_min_level.load()) return;

    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());

    nlohmann::json rec;
    rec["ts"] = secs.count();
    rec["level"] = level_name(level);
    rec["msg"] = std::string(msg);
    for (const auto& [k, v] : fields) rec[std::string(k)] = v;

    std::lock_guard lock(g_mutex);
    std::fputs(rec.dump().c_str(), stderr);
    std::fputc('\n', stderr);
}

}  // namespace ctmine::log
