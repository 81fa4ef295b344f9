#pragma once

#include <functional>
#include <string_view>

namespace sunny {

enum class LogLevel { debug, info, warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Replaces the process-wide sink. Passing an empty function silences output.
// The default sink prints warnings to stderr and drops everything else.
void set_log_sink(LogSink sink);
void set_log_threshold(LogLevel level);

void log(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::info, message); }
inline void log_debug(std::string_view message) { log(LogLevel::debug, message); }

}  // namespace sunny
