// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <functional>
#include <string_view>

namespace autoarabic::log {

enum class Level { info, warning, error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (default: standard error). Returns the
/// previous one so tests can restore it.
Sink set_sink(Sink sink);

void write(Level level, std::string_view message);
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warning, m); }
inline void error(std::string_view m) { write(Level::error, m); }

}  // namespace autoarabic::log
