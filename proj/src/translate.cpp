// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/translate.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic {

namespace {

bool is_terminal_punctuation(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x061F || cp == 0x06D4 || cp == 0x2026;
}

}  // namespace

SuffixCleanup clean_suffix_artifact(std::string_view input) {
    const std::u32string phrase = text::decode_utf8(kArabicSuffixPhrase);
    std::u32string cps = text::decode_utf8(input);

    std::size_t end = cps.size();
    while (end > 0 && text::is_unicode_space(cps[end - 1])) --end;
    std::size_t punct_begin = end;
    while (punct_begin > 0 && is_terminal_punctuation(cps[punct_begin - 1])) --punct_begin;

    std::size_t body_end = punct_begin;
    while (body_end > 0 && text::is_unicode_space(cps[body_end - 1])) --body_end;

    bool removed = false;
    while (body_end >= phrase.size() &&
           cps.compare(body_end - phrase.size(), phrase.size(), phrase) == 0) {
        const std::size_t phrase_begin = body_end - phrase.size();
        if (phrase_begin > 0 && !text::is_unicode_space(cps[phrase_begin - 1])) break;
        std::size_t new_end = phrase_begin;
        while (new_end > 0 && text::is_unicode_space(cps[new_end - 1])) --new_end;
        if (new_end == 0) break;
        body_end = new_end;
        removed = true;
    }
    if (!removed) return {std::string(input), false};

    std::u32string out = cps.substr(0, body_end);
    out += cps.substr(punct_begin, end - punct_begin);
    out += cps.substr(end);
    return {text::encode_utf8(out), true};
}

bool detect_partial_translation(std::string_view source, std::string_view translation, double ratio_threshold) {
    if (source.empty() || translation.empty()) throw PreconditionError("source and translation must be non-empty");
    if (!(ratio_threshold > 0.0 && ratio_threshold < 1.0)) {
        throw PreconditionError("ratio_threshold must be in (0, 1)");
    }
    const auto src = text::tokenize(source).size();
    if (src == 0) throw PreconditionError("source has no tokens");
    const auto tgt = text::tokenize(translation).size();
    return static_cast<double>(tgt) / static_cast<double>(src) < ratio_threshold;
}

namespace {

using ApplyFn = std::function<void(std::string_view, const std::function<void(Corpus&)>&)>;

TranslateSummary run_translation(const Corpus& snapshot, const ApplyFn& apply, CompletionClient& client,
                                 const TranslateOptions& options) {
    TranslateSummary summary;
    std::vector<const CaptionRecord*> work;
    bool any_translated = false;
    for (const auto& [id, r] : snapshot.captions()) {
        if (r.status == Status::pending) {
            work.push_back(&r);
        } else {
            any_translated = true;
            ++summary.skipped;
        }
    }
    if (!options.resume) {
        if (any_translated) {
            throw PreconditionError("corpus already contains translations; rerun with resume to continue");
        }
        if (work.empty()) throw PreconditionError("corpus has no pending captions");
    }
    if (work.size() > options.limit) work.resize(options.limit);
    if (work.empty()) return summary;

    std::atomic<std::size_t> next{0};
    std::mutex summary_mu;
    std::exception_ptr fatal;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next++;
            if (i >= work.size()) return;
            {
                std::lock_guard lock(summary_mu);
                if (fatal) return;
            }
            const CaptionRecord& rec = *work[i];
            try {
                const auto response = client.complete(build_translation_prompt(rec.source_text));
                std::string raw = response.text;
                // Providers occasionally wrap the answer in whitespace.
                while (!raw.empty() && (raw.back() == '\n' || raw.back() == ' ')) raw.pop_back();
                while (!raw.empty() && (raw.front() == '\n' || raw.front() == ' ')) raw.erase(raw.begin());
                if (raw.empty()) throw TransportError("provider returned only whitespace");

                std::optional<EditRecord> cleanup;
                if (auto cleaned = clean_suffix_artifact(raw); cleaned.removed) {
                    cleanup = EditRecord{rec.caption_id, raw, cleaned.text, {ErrorCategory::hallucination},
                                         std::string(kSuffixCleanupAnnotator), options.clock()};
                }
                const bool had_cleanup = cleanup.has_value();
                apply(rec.caption_id, [&](Corpus& c) { c.record_translation(rec.caption_id, raw, cleanup); });
                std::lock_guard lock(summary_mu);
                ++summary.translated;
                if (had_cleanup) ++summary.suffix_removed;
            } catch (const ConfigError&) {
                std::lock_guard lock(summary_mu);
                if (!fatal) fatal = std::current_exception();
                return;
            } catch (const Error& e) {
                log::warn("caption " + rec.caption_id + ": translation failed: " + e.what());
                apply(rec.caption_id,
                      [&](Corpus& c) { c.set_note(rec.caption_id, std::string("translation failed: ") + e.what()); });
                std::lock_guard lock(summary_mu);
                ++summary.failed;
            }
        }
    };

    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(client.config().max_parallel), work.size());
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (fatal) std::rethrow_exception(fatal);
    return summary;
}

}  // namespace

TranslateSummary translate_corpus(CorpusStore& store, CompletionClient& client, const TranslateOptions& options) {
    const Corpus snapshot = store.snapshot();
    return run_translation(
        snapshot, [&](std::string_view id, const std::function<void(Corpus&)>& fn) { store.update(id, fn); }, client,
        options);
}

Corpus translate_corpus(Corpus corpus, CompletionClient& client, const TranslateOptions& options,
                        TranslateSummary* summary) {
    const Corpus snapshot = corpus;
    std::mutex mu;
    auto result = run_translation(
        snapshot,
        [&](std::string_view, const std::function<void(Corpus&)>& fn) {
            std::lock_guard lock(mu);
            fn(corpus);
        },
        client, options);
    if (summary) *summary = result;
    return corpus;
}

}  // namespace autoarabic
