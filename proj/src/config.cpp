// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/config.hpp"

#include <charconv>
#include <set>

#include "autoarabic/corpus_store.hpp"
#include "autoarabic/errors.hpp"

namespace autoarabic {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

std::string unquote(std::string_view v, const std::string& source, std::size_t line_no) {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size(); ++i) {
        const char c = v[i];
        if (c == '"') break;
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (++i == v.size()) break;
        switch (v[i]) {
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            default: throw ParseError(source, line_no, std::string("unknown escape \\") + v[i]);
        }
    }
    if (i >= v.size()) throw ParseError(source, line_no, "unterminated string");
    const auto rest = trim(v.substr(i + 1));
    if (!rest.empty() && rest.front() != '#') throw ParseError(source, line_no, "trailing characters after string");
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, const std::string& source_name) {
    ConfigFile cfg;
    cfg.source_ = source_name;
    std::string section;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string_view::npos) throw ParseError(source_name, line_no, "unterminated section header");
            const auto rest = trim(line.substr(close + 1));
            if (!rest.empty() && rest.front() != '#') {
                throw ParseError(source_name, line_no, "unexpected text after section header");
            }
            section = std::string(trim(line.substr(1, close - 1)));
            if (!valid_name(section)) throw ParseError(source_name, line_no, "invalid section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (!valid_name(key)) throw ParseError(source_name, line_no, "invalid key '" + std::string(key) + "'");
        auto value = trim(line.substr(eq + 1));
        std::string parsed;
        if (!value.empty() && value.front() == '"') {
            parsed = unquote(value, source_name, line_no);
        } else {
            const auto hash = value.find('#');
            parsed = std::string(trim(value.substr(0, hash)));
        }
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (cfg.values_.contains(full)) throw ParseError(source_name, line_no, "duplicate key '" + full + "'");
        cfg.values_.emplace(full, std::move(parsed));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
}

bool ConfigFile::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> ConfigFile::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> ConfigFile::get_double(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw ConfigError(source_ + ": " + std::string(key) + " must be a number, got '" + *v + "'");
    }
    return out;
}

std::optional<std::int64_t> ConfigFile::get_int(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw ConfigError(source_ + ": " + std::string(key) + " must be an integer, got '" + *v + "'");
    }
    return out;
}

std::optional<bool> ConfigFile::get_bool(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError(source_ + ": " + std::string(key) + " must be true or false, got '" + *v + "'");
}

void ConfigFile::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

namespace {

void apply_provider(const ConfigFile& f, std::string_view section, ProviderConfig& p) {
    const std::string s(section);
    if (auto v = f.get(s + ".model_name")) p.model_name = *v;
    if (auto v = f.get_double(s + ".temperature")) p.temperature = *v;
    if (auto v = f.get_double(s + ".top_p")) p.top_p = *v;
    if (auto v = f.get_int(s + ".max_parallel")) p.max_parallel = static_cast<int>(*v);
    if (auto v = f.get_int(s + ".requests_per_minute")) p.requests_per_minute = static_cast<int>(*v);
    if (auto v = f.get(s + ".api_key_env")) p.api_key_env = *v;
    if (auto v = f.get(s + ".base_url")) p.base_url = *v;
    if (auto v = f.get_int(s + ".max_retries")) p.max_retries = static_cast<int>(*v);
    if (auto v = f.get_int(s + ".backoff_initial_ms")) p.backoff_initial = std::chrono::milliseconds(*v);
    if (auto v = f.get_int(s + ".backoff_max_ms")) p.backoff_max = std::chrono::milliseconds(*v);
    if (auto v = f.get_int(s + ".request_timeout_ms")) p.request_timeout = std::chrono::milliseconds(*v);
}

const std::set<std::string, std::less<>>& known_keys() {
    static const std::set<std::string, std::less<>> keys = [] {
        std::set<std::string, std::less<>> k = {
            "corpus.path",        "corpus.compact_every", "run.provider",      "run.seed",
            "run.fixed_time",     "run.cache_dir",        "detect.lexicon",    "detect.partial_ratio",
            "review.bind",        "review.port",          "review.static_dir",
        };
        for (const char* s : {"translate", "judge"}) {
            for (const char* f : {"model_name", "temperature", "top_p", "max_parallel", "requests_per_minute",
                                  "api_key_env", "base_url", "max_retries", "backoff_initial_ms", "backoff_max_ms",
                                  "request_timeout_ms"}) {
                k.insert(std::string(s) + "." + f);
            }
        }
        return k;
    }();
    return keys;
}

}  // namespace

void RunConfig::apply(const ConfigFile& f) {
    for (const auto& [key, value] : f.values()) {
        if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (auto v = f.get("corpus.path")) corpus = *v;
    if (auto v = f.get_int("corpus.compact_every")) {
        if (*v < 1) throw ConfigError("corpus.compact_every must be positive");
        compact_every = static_cast<std::size_t>(*v);
    }
    if (auto v = f.get("run.provider")) provider = *v;
    if (auto v = f.get_int("run.seed")) seed = static_cast<std::uint64_t>(*v);
    if (auto v = f.get("run.fixed_time")) fixed_time = *v;
    if (auto v = f.get("run.cache_dir")) cache_dir = *v;
    if (auto v = f.get("detect.lexicon")) lexicon = *v;
    if (auto v = f.get_double("detect.partial_ratio")) partial_ratio = *v;
    if (auto v = f.get("review.bind")) bind_address = *v;
    if (auto v = f.get_int("review.port")) port = static_cast<int>(*v);
    if (auto v = f.get("review.static_dir")) static_dir = *v;
    apply_provider(f, "translate", translate);
    apply_provider(f, "judge", judge);

    if (provider != "mock" && provider != "live") {
        throw ConfigError("run.provider must be mock or live, got '" + provider + "'");
    }
    if (port < 0 || port > 65535) throw ConfigError("review.port out of range: " + std::to_string(port));
    if (!(partial_ratio > 0.0 && partial_ratio < 1.0)) throw ConfigError("detect.partial_ratio must be in (0, 1)");
    if (fixed_time) {
        try {
            parse_rfc3339(*fixed_time);
        } catch (const Error& e) {
            throw ConfigError(std::string("run.fixed_time: ") + e.what());
        }
    }
    translate.provider_name = provider;
    judge.provider_name = provider;
    translate.validate();
    judge.validate();
}

}  // namespace autoarabic
