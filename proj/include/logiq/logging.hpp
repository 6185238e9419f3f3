#pragma once

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

namespace logiq {

// Diagnostics go to stderr only, gated by LOGIQ_LOG=info|debug.
enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("LOGIQ_LOG");
        if (!env) return LogLevel::Off;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Off;
    }();
    return level;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[logiq] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[logiq:debug] " << msg << "\n";
}

} // namespace logiq
