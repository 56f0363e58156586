#include "pireduce/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace pireduce::log {

Level current_level() {
  static const Level level = [] {
    const char* env = std::getenv("PIREDUCE_LOG");
    if (env == nullptr) return Level::Warn;
    const std::string v(env);
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(current_level())) return;
  static std::mutex mutex;
  static constexpr const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(mutex);
  std::cerr << "[pireduce " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace pireduce::log
