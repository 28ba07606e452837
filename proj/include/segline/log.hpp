#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace segline {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from SEGLINE_LOG={error,info,debug}; default info.
inline LogLevel log_level() {
    static const LogLevel lvl = [] {
        const char* env = std::getenv("SEGLINE_LOG");
        if (env == nullptr) return LogLevel::info;
        std::string s(env);
        if (s == "error") return LogLevel::error;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::info;
    }();
    return lvl;
}

// No timestamps: log output is part of the determinism contract.
inline void log_error(const std::string& msg) { std::cerr << "[error] " << msg << "\n"; }

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace segline
