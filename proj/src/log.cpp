#include "graphrep/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace graphrep::log {
namespace {

std::atomic<Level> g_level{Level::kWarn};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::cerr << tag << ": " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void warn(std::string_view message) {
  if (g_level.load() >= Level::kWarn) emit("warning", message);
}

void info(std::string_view message) {
  if (g_level.load() >= Level::kInfo) emit("info", message);
}

}  // namespace graphrep::log
