#pragma once

#include <string_view>

namespace diracgap::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

/// Initialised from DIRAC_GAP_LOG (quiet | info | debug; default quiet).
Level level();
void set_level(Level l);

void info(std::string_view msg);
void debug(std::string_view msg);
void warn(std::string_view msg);

}  // namespace diracgap::log
