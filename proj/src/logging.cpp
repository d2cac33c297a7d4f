// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/logging.hpp"

#include <iostream>
#include <mutex>

namespace autoarabic::log {

namespace {

std::mutex& sink_mutex() {
    static std::mutex mu;
    return mu;
}

Sink& current_sink() {
    static Sink sink = [](Level level, std::string_view message) {
        static constexpr std::string_view kNames[] = {"info", "warning", "error"};
        std::cerr << kNames[static_cast<int>(level)] << ": " << message << '\n';
    };
    return sink;
}

}  // namespace

Sink set_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    Sink previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

void write(Level level, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(level, message);
}

}  // namespace autoarabic::log
