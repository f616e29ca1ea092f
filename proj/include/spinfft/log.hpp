#pragma once

#include <functional>
#include <string>

namespace spinfft::log {

enum class Level { Info, Warning };

using Sink = std::function<void(Level, const std::string&)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes "[spinfft] ..." lines to stderr. Safe to call from workers.
Sink setSink(Sink sink);

void info(const std::string& message);
void warn(const std::string& message);

}  // namespace spinfft::log
