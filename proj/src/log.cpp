#include "mapmatch/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace mapmatch::logging {

namespace {

Level parse_env() {
  const char* env = std::getenv("GSMM_LOG");
  if (env == nullptr) return Level::Warn;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  return Level::Warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::Error:
      return "error";
    case Level::Warn:
      return "warn";
    case Level::Info:
      return "info";
    case Level::Debug:
      return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() {
  static Level t = parse_env();
  return t;
}

bool enabled(Level level) {
  return static_cast<int>(level) <= static_cast<int>(threshold());
}

void logf(Level level, const char* fmt, ...) {
  if (!enabled(level)) return;
  std::fprintf(stderr, "[%s] ", tag(level));
  va_list ap;
  va_start(ap, fmt);
  std::vfprintf(stderr, fmt, ap);
  va_end(ap);
  std::fputc('\n', stderr);
}

}  // namespace mapmatch::logging
