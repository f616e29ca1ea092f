#include "spinfft/log.hpp"

#include <iostream>
#include <mutex>

namespace spinfft::log {
namespace {

std::mutex& sinkMutex() {
    static std::mutex m;
    return m;
}

void defaultSink(Level level, const std::string& message) {
    std::cerr << "[spinfft] " << (level == Level::Warning ? "warning: " : "") << message << '\n';
}

Sink& currentSink() {
    static Sink sink = defaultSink;
    return sink;
}

void emit(Level level, const std::string& message) {
    std::lock_guard<std::mutex> lock(sinkMutex());
    if (currentSink()) {
        currentSink()(level, message);
    }
}

}  // namespace

Sink setSink(Sink sink) {
    std::lock_guard<std::mutex> lock(sinkMutex());
    Sink previous = std::move(currentSink());
    currentSink() = std::move(sink);
    return previous;
}

void info(const std::string& message) { emit(Level::Info, message); }

void warn(const std::string& message) { emit(Level::Warning, message); }

}  // namespace spinfft::log
