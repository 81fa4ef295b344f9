#include "sunny/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace sunny {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = [](LogLevel level, std::string_view message) {
    const char* tag = level == LogLevel::warning ? "warning" : level == LogLevel::info ? "info" : "debug";
    std::cerr << "[sunny] " << tag << ": " << message << '\n';
  };
  return s;
}

LogLevel& threshold() {
  static LogLevel t = LogLevel::warning;
  return t;
}

}  // namespace

void set_log_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void set_log_threshold(LogLevel level) {
  std::lock_guard lock(sink_mutex());
  threshold() = level;
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (static_cast<int>(level) < static_cast<int>(threshold()) || !sink()) return;
  sink()(level, message);
}

}  // namespace sunny
