// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <string_view>

#include "autoarabic/error_category.hpp"
#include "autoarabic/errors.hpp"

namespace autoarabic {

struct ProviderConfig {
    std::string provider_name = "mock";
    std::string model_name = "gemini-2.0-flash";
    double temperature = 0.7;
    double top_p = 1.0;
    int max_parallel = 4;
    int requests_per_minute = 60;
    std::string api_key_env = "AUTOARABIC_TRANSLATE_KEY";
    /// OpenAI-compatible endpoint root for live providers.
    std::string base_url = "https://generativelanguage.googleapis.com/v1beta/openai";
    int max_retries = 4;
    std::chrono::milliseconds backoff_initial{500};
    std::chrono::milliseconds backoff_max{30000};
    std::chrono::milliseconds request_timeout{60000};
    /// Length of the rate-limit window; one minute outside of tests.
    std::chrono::milliseconds rate_window{60000};

    /// Translation defaults: temperature 0.7, top-p 1.0.
    static ProviderConfig translation_defaults();
    /// Judge defaults: GPT-4o endpoint, temperature 0.0.
    static ProviderConfig judge_defaults();

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

struct CompletionRequest {
    std::string prompt;
    ProviderConfig config;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct CompletionResponse {
    std::string text;
    std::chrono::milliseconds latency{0};
    std::optional<TokenUsage> usage;
    bool from_cache = false;
};

/// Retryable provider failure (timeouts, 429, 5xx).
class TransientProviderError : public TransportError {
public:
    using TransportError::TransportError;
};

// --- prompts ---------------------------------------------------------------

/// Translation prompt with `{caption}` substituted verbatim.
std::string build_translation_prompt(std::string_view caption);
/// The template with its `{caption}` placeholder intact.
std::string_view translation_prompt_template() noexcept;

/// Judge prompt embedding the source caption and its translation.
std::string build_judge_prompt(std::string_view source, std::string_view translation);
std::string_view judge_prompt_template() noexcept;

/// Recovers the caption from a translation prompt, if `prompt` is one.
std::optional<std::string> caption_from_translation_prompt(std::string_view prompt);
/// Recovers (source, translation) from a judge prompt, if `prompt` is one.
std::optional<std::pair<std::string, std::string>> texts_from_judge_prompt(std::string_view prompt);

enum class VerdictKind { exact, salvaged, parse_error };

struct JudgeVerdict {
    CategorySet categories;
    VerdictKind kind = VerdictKind::exact;
};

/// Strict `FLAGS: a,b` / `FLAGS: none` first; otherwise scans the answer
/// for category tokens; otherwise reports a parse error.
JudgeVerdict parse_judge_output(std::string_view raw);

// --- backends --------------------------------------------------------------

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    /// Throws TransientProviderError for retryable failures and
    /// TransportError for permanent ones.
    virtual CompletionResponse send(const CompletionRequest& request) = 0;
};

/// Deterministic offline provider. Responses come from a seeded table when
/// the prompt is listed there, otherwise from a pseudo-translator (for
/// translation prompts) or a pseudo-judge (for judge prompts), both pure
/// functions of (seed, prompt).
class MockBackend final : public CompletionBackend {
public:
    explicit MockBackend(std::uint64_t seed = 0);

    CompletionResponse send(const CompletionRequest& request) override;

    void set_response(std::string prompt, std::string response);
    /// Prompts containing `needle` fail permanently.
    void fail_permanently_on(std::string needle);
    /// Prompts containing `needle` fail `times` times, then succeed.
    void fail_transiently_on(std::string needle, int times);
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    std::size_t calls() const noexcept { return calls_.load(); }
    int max_in_flight() const noexcept { return max_in_flight_.load(); }

    std::uint64_t seed() const noexcept { return seed_; }

    /// The default outputs, exposed for tests.
    std::string pseudo_translate(std::string_view caption) const;
    std::string pseudo_judge(std::string_view source, std::string_view translation) const;

private:
    std::uint64_t seed_;
    std::chrono::milliseconds latency_{0};
    mutable std::mutex mu_;
    std::map<std::string, std::string, std::less<>> table_;
    std::set<std::string, std::less<>> permanent_;
    std::map<std::string, int, std::less<>> transient_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

/// OpenAI-compatible chat-completions client (`POST {base_url}/chat/completions`).
class HttpBackend final : public CompletionBackend {
public:
    /// Reads the credential from `config.api_key_env`; throws ConfigError
    /// when it is unset.
    explicit HttpBackend(const ProviderConfig& config);
    CompletionResponse send(const CompletionRequest& request) override;

private:
    std::string api_key_;
    std::string scheme_host_;
    std::string path_prefix_;
};

/// Builds the backend named by `config.provider_name` ("mock" or "live").
std::shared_ptr<CompletionBackend> make_backend(const ProviderConfig& config, std::uint64_t mock_seed);

// --- client ----------------------------------------------------------------

/// On-disk (or in-memory when `dir` is empty) response cache keyed by
/// (model, prompt, temperature, top_p). One file per entry, named by the
/// SHA-256 of the key, holding the raw response text.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir = {});

    static std::string key(const CompletionRequest& request);

    std::optional<std::string> get(const std::string& key);
    void put(const std::string& key, const std::string& value);

    std::filesystem::path file_for(const std::string& key) const;

private:
    std::filesystem::path dir_;
    std::mutex mu_;
    std::map<std::string, std::string> memory_;
};

/// Sliding-window limiter: at most `limit` acquisitions in any `window`.
class RateLimiter {
public:
    RateLimiter(int limit, std::chrono::milliseconds window);
    void acquire();

private:
    using TimePoint = std::chrono::steady_clock::time_point;
    int limit_;
    std::chrono::milliseconds window_;
    std::mutex mu_;
    std::deque<TimePoint> stamps_;
};

/// Thread-safe completion entry point: cache, bounded parallelism, rate
/// limiting and retry with exponential backoff in front of a backend.
class CompletionClient {
public:
    CompletionClient(ProviderConfig config, std::shared_ptr<CompletionBackend> backend,
                     std::shared_ptr<ResponseCache> cache = nullptr);

    CompletionResponse complete(const std::string& prompt);
    CompletionResponse complete(const CompletionRequest& request);

    const ProviderConfig& config() const noexcept { return config_; }
    std::size_t backend_calls() const noexcept { return backend_calls_.load(); }

private:
    ProviderConfig config_;
    std::shared_ptr<CompletionBackend> backend_;
    std::shared_ptr<ResponseCache> cache_;
    std::counting_semaphore<> slots_;
    RateLimiter limiter_;
    std::atomic<std::size_t> backend_calls_{0};
};

}  // namespace autoarabic
