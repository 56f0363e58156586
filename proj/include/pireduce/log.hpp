#pragma once

// Minimal stderr logger. Level comes from PIREDUCE_LOG (error|warn|info|debug),
// default warn.

#include <string_view>

namespace pireduce::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level current_level();
void write(Level level, std::string_view message);

inline void error(std::string_view m) { write(Level::Error, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void debug(std::string_view m) { write(Level::Debug, m); }

}  // namespace pireduce::log
