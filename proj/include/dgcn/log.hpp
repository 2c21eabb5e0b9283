#ifndef DGCN_LOG_HPP_
#define DGCN_LOG_HPP_

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace dgcn::log {

enum class Level { debug = 0, info = 1, warn = 2, quiet = 3 };

/// Verbosity from DGCN_LOG (debug|info|warn|quiet), read once. Default info.
inline Level threshold() {
    static const Level lvl = [] {
        const char* env = std::getenv("DGCN_LOG");
        if (!env) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        if (std::strcmp(env, "warn") == 0) return Level::warn;
        if (std::strcmp(env, "quiet") == 0) return Level::quiet;
        return Level::info;
    }();
    return lvl;
}

inline void vlog(Level lvl, const char* tag, const char* fmt, std::va_list ap) {
    if (lvl < threshold()) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, ap);
    std::fputc('\n', stderr);
}

inline void debug(const char* fmt, ...) {
    std::va_list ap;
    va_start(ap, fmt);
    vlog(Level::debug, "debug", fmt, ap);
    va_end(ap);
}

inline void info(const char* fmt, ...) {
    std::va_list ap;
    va_start(ap, fmt);
    vlog(Level::info, "info", fmt, ap);
    va_end(ap);
}

inline void warn(const char* fmt, ...) {
    std::va_list ap;
    va_start(ap, fmt);
    vlog(Level::warn, "warn", fmt, ap);
    va_end(ap);
}

} // namespace dgcn::log

#endif // DGCN_LOG_HPP_
