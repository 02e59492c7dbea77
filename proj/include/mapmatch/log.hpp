#pragma once

#include <cstdarg>

namespace mapmatch::logging {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from GSMM_LOG (error|warn|info|debug), read once. Default
// is warn.
Level threshold();
bool enabled(Level level);

void logf(Level level, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

}  // namespace mapmatch::logging
