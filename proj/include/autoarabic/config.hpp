// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "autoarabic/provider.hpp"

namespace autoarabic {

/// Flat sectioned key/value file:
///
///     # comment
///     [translate]
///     model_name = "gemini-2.0-flash"
///     temperature = 0.7
///
/// Values are bare words, numbers, booleans or double-quoted strings with
/// `\"`, `\\`, `\n` and `\t` escapes. Keys are addressed as `section.key`.
class ConfigFile {
public:
    static ConfigFile parse(std::string_view text, const std::string& source_name);
    static ConfigFile load(const std::filesystem::path& path);

    bool contains(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<std::int64_t> get_int(std::string_view key) const;
    std::optional<bool> get_bool(std::string_view key) const;

    void set(std::string key, std::string value);
    const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::string source_ = "<config>";
};

/// Everything a run needs besides credentials.
struct RunConfig {
    std::filesystem::path corpus;
    std::string provider = "mock";
    std::uint64_t seed = 0;
    ProviderConfig translate = ProviderConfig::translation_defaults();
    ProviderConfig judge = ProviderConfig::judge_defaults();
    std::filesystem::path cache_dir;
    std::filesystem::path lexicon;
    double partial_ratio = 0.3;
    std::size_t compact_every = 1000;
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::filesystem::path static_dir;
    /// Fixed clock for reproducible mock runs; RFC 3339.
    std::optional<std::string> fixed_time;

    /// Applies recognized keys; unknown keys raise ConfigError.
    void apply(const ConfigFile& file);
};

}  // namespace autoarabic
