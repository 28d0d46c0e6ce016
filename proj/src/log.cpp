#include "diracgap/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace diracgap::log {

namespace {

Level from_env() {
  const char* v = std::getenv("DIRAC_GAP_LOG");
  if (!v) return Level::quiet;
  const std::string s(v);
  if (s == "debug") return Level::debug;
  if (s == "info") return Level::info;
  return Level::quiet;
}

Level& current() {
  static Level l = from_env();
  return l;
}

void emit(const char* tag, std::string_view msg) { std::cerr << "[diracgap " << tag << "] " << msg << '\n'; }

}  // namespace

Level level() { return current(); }
void set_level(Level l) { current() = l; }

void info(std::string_view msg) {
  if (current() >= Level::info) emit("info", msg);
}

void debug(std::string_view msg) {
  if (current() >= Level::debug) emit("debug", msg);
}

void warn(std::string_view msg) {
  if (current() >= Level::info) emit("warning", msg);
}

}  // namespace diracgap::log
