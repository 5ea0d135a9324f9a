#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace ctmine::log {

enum class Level { Debug, Info, Warn, Error };

void set_min_level(Level level);

// Emits one line-delimited JSON record to stderr:
//   {"ts":"...","level":"info","msg":"...","key":"value",...}
void write(Level level, std::string_view msg,
           std::initializer_list<std::pair<std::string_view, std::string>> fields = {});

inline void info(std::string_view msg,
                 std::initializer_list<std::pair<std::string_view, std::string>> fields = {}) {
    write(Level::Info, msg, fields);
}
inline void warn(std::string_view msg,
                 std::initializer_list<std::pair<std::string_view, std::string>> fields = {}) {
    write(Level::Warn, msg, fields);
}
inline void error(std::string_view msg,
                  std::initializer_list<std::pair<std::string_view, std::string>> fields = {}) {
    write(Level::Error, msg, fields);
}

}  // namespace ctmine::log
