// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/hash.hpp"
#include "autoarabic/logging.hpp"
#include "autoarabic/provider.hpp"

namespace autoarabic {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
}

std::string ResponseCache::key(const CompletionRequest& request) {
    char params[64];
    std::snprintf(params, sizeof params, "%.17g\n%.17g", request.config.temperature, request.config.top_p);
    return request.config.model_name + "\n" + params + "\n" + request.prompt;
}

fs::path ResponseCache::file_for(const std::string& key) const {
    return dir_ / sha256_hex(key);
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
    std::lock_guard lock(mu_);
    if (dir_.empty()) {
        auto it = memory_.find(key);
        if (it == memory_.end()) return std::nullopt;
        return it->second;
    }
    const fs::path file = file_for(key);
    std::error_code ec;
    if (!fs::exists(file, ec)) return std::nullopt;
    try {
        std::string value = read_file(file);
        if (value.empty() || !text::is_valid_utf8(value)) {
            log::warn("cache entry " + file.string() + " is corrupt; bypassing cache");
            return std::nullopt;
        }
        return value;
    } catch (const std::exception& e) {
        log::warn("cache entry " + file.string() + " unreadable (" + e.what() + "); bypassing cache");
        return std::nullopt;
    }
}

void ResponseCache::put(const std::string& key, const std::string& value) {
    std::lock_guard lock(mu_);
    if (dir_.empty()) {
        memory_.insert_or_assign(key, value);
        return;
    }
    try {
        write_file_atomic(file_for(key), value);
    } catch (const std::exception& e) {
        log::warn(std::string("cannot write cache entry: ") + e.what());
    }
}

RateLimiter::RateLimiter(int limit, std::chrono::milliseconds window) : limit_(limit), window_(window) {}

void RateLimiter::acquire() {
    while (true) {
        std::chrono::steady_clock::duration wait{};
        {
            std::lock_guard lock(mu_);
            const auto now = std::chrono::steady_clock::now();
            while (!stamps_.empty() && now - stamps_.front() >= window_) stamps_.pop_front();
            if (static_cast<int>(stamps_.size()) < limit_) {
                stamps_.push_back(now);
                return;
            }
            wait = stamps_.front() + window_ - now;
        }
        std::this_thread::sleep_for(wait);
    }
}

CompletionClient::CompletionClient(ProviderConfig config, std::shared_ptr<CompletionBackend> backend,
                                   std::shared_ptr<ResponseCache> cache)
    : config_((config.validate(), std::move(config))),
      backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      slots_(config_.max_parallel),
      limiter_(config_.requests_per_minute, config_.rate_window) {}

CompletionResponse CompletionClient::complete(const std::string& prompt) {
    return complete(CompletionRequest{prompt, config_});
}

CompletionResponse CompletionClient::complete(const CompletionRequest& request) {
    const std::string key = ResponseCache::key(request);
    if (auto hit = cache_->get(key)) {
        return CompletionResponse{std::move(*hit), std::chrono::milliseconds{0}, std::nullopt, true};
    }

    auto backoff = config_.backoff_initial;
    for (int attempt = 0;; ++attempt) {
        limiter_.acquire();
        try {
            slots_.acquire();
            struct Release {
                std::counting_semaphore<>& s;
                ~Release() { s.release(); }
            } release{slots_};
            ++backend_calls_;
            CompletionResponse res = backend_->send(request);
            if (res.text.empty()) throw TransientProviderError("empty response");
            cache_->put(key, res.text);
            return res;
        } catch (const TransientProviderError& e) {
            if (attempt >= config_.max_retries) {
                throw TransportError("giving up after " + std::to_string(attempt + 1) + " attempts: " + e.what());
            }
            log::warn(std::string("transient provider error, retrying: ") + e.what());
            std::this_thread::sleep_for(backoff);
            backoff = std::min(backoff * 2, config_.backoff_max);
        }
    }
}

}  // namespace autoarabic
