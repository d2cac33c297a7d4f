// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/detect.hpp"

#include <array>
#include <atomic>
#include <mutex>
#include <thread>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic {

std::string_view to_string(LoanwordPolicy p) noexcept {
    switch (p) {
        case LoanwordPolicy::keep: return "keep";
        case LoanwordPolicy::replace: return "replace";
        case LoanwordPolicy::flag_only: return "flag_only";
    }
    return "";
}

LoanwordPolicy loanword_policy_from_string(std::string_view s) {
    for (auto p : {LoanwordPolicy::keep, LoanwordPolicy::replace, LoanwordPolicy::flag_only}) {
        if (to_string(p) == s) return p;
    }
    throw ValidationError("unknown loanword policy '" + std::string(s) + "'");
}

LoanwordLexicon LoanwordLexicon::seed() {
    LoanwordLexicon lex;
    lex.add({"كاميرا", "آلة التصوير", LoanwordPolicy::keep});
    return lex;
}

void LoanwordLexicon::add(LoanwordEntry entry) {
    entry.surface = text::strip_diacritics(entry.surface);
    if (entry.surface.empty()) throw ValidationError("loanword surface form is empty");
    if (entries_.contains(entry.surface)) throw ValidationError("duplicate loanword '" + entry.surface + "'");
    auto key = entry.surface;
    entries_.emplace(std::move(key), std::move(entry));
}

void LoanwordLexicon::merge(const LoanwordLexicon& other) {
    for (const auto& [k, v] : other.entries_) entries_.insert_or_assign(k, v);
}

const LoanwordEntry* LoanwordLexicon::find(std::string_view surface) const {
    auto it = entries_.find(surface);
    return it == entries_.end() ? nullptr : &it->second;
}

LoanwordLexicon LoanwordLexicon::parse(std::string_view data, const std::string& source_name) {
    LoanwordLexicon lex;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        std::string_view line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? data.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 3) throw ParseError(source_name, line_no, "expected surface<TAB>preferred<TAB>policy");
        try {
            lex.add({std::string(fields[0]), std::string(fields[1]), loanword_policy_from_string(fields[2])});
        } catch (const ValidationError& e) {
            throw ParseError(source_name, line_no, e.what());
        }
    }
    return lex;
}

LoanwordLexicon LoanwordLexicon::load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
}

const std::string& detection_text(const CaptionRecord& caption) {
    return caption.latest_text();
}

bool detect_diacritics_flag(const CaptionRecord& caption) {
    if (!caption.raw_translation) throw PreconditionError("caption " + caption.caption_id + " has no translation");
    return text::has_diacritics(detection_text(caption));
}

namespace {

constexpr std::array<std::string_view, 7> kArticlePrefixes = {"", "ال", "وال", "بال", "فال", "كال", "لل"};

}  // namespace

std::vector<LoanwordMatch> detect_loanword_matches(const CaptionRecord& caption, const LoanwordLexicon& lexicon) {
    std::vector<LoanwordMatch> out;
    if (lexicon.empty() || !caption.raw_translation) return out;
    const auto tokens = text::tokenize(text::strip_diacritics(detection_text(caption))).tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string_view tok = tokens[i];
        for (auto prefix : kArticlePrefixes) {
            if (tok.size() <= prefix.size() || tok.substr(0, prefix.size()) != prefix) continue;
            if (const auto* e = lexicon.find(tok.substr(prefix.size()))) {
                out.push_back({*e, i, tokens[i]});
                break;
            }
        }
    }
    return out;
}

bool loanword_flag(const std::vector<LoanwordMatch>& matches) {
    for (const auto& m : matches) {
        if (m.entry.policy != LoanwordPolicy::keep) return true;
    }
    return false;
}

FlagRecord rule_flags(const CaptionRecord& caption, const LoanwordLexicon& lexicon, const DetectOptions& options) {
    if (!caption.raw_translation) throw PreconditionError("caption " + caption.caption_id + " has no translation");
    FlagRecord rec;
    rec.caption_id = caption.caption_id;
    rec.created_at = options.clock();
    auto mark = [&](ErrorCategory c) {
        rec.categories.insert(c);
        rec.source_per_category[c] = FlagSource::rule;
    };
    if (detect_diacritics_flag(caption)) mark(ErrorCategory::diacritics);
    if (loanword_flag(detect_loanword_matches(caption, lexicon))) mark(ErrorCategory::loanword);
    const std::string& translation = detection_text(caption);
    if (!caption.source_text.empty() && !text::tokenize(caption.source_text).empty() &&
        detect_partial_translation(caption.source_text, translation.empty() ? std::string_view(" ") : translation,
                                   options.partial_ratio)) {
        mark(ErrorCategory::literal);
    }
    return rec;
}

FlagRecord judge_caption(const CaptionRecord& caption, CompletionClient& judge, const LoanwordLexicon& lexicon,
                         const DetectOptions& options) {
    FlagRecord rec = rule_flags(caption, lexicon, options);
    std::string response;
    try {
        response = judge.complete(build_judge_prompt(caption.source_text, detection_text(caption))).text;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        log::warn("caption " + caption.caption_id + ": judge call failed: " + e.what());
        rec.review_needed = true;
        return rec;
    }
    rec.judge_raw_output = response;
    const JudgeVerdict verdict = parse_judge_output(response);
    if (verdict.kind == VerdictKind::parse_error) {
        rec.review_needed = true;
        return rec;
    }
    for (auto c : kAllCategories) {
        if (verdict.categories.contains(c) && !rec.categories.contains(c)) {
            rec.categories.insert(c);
            rec.source_per_category[c] = FlagSource::judge;
        }
    }
    return rec;
}

namespace {

using ApplyFn = std::function<void(std::string_view, const std::function<void(Corpus&)>&)>;

DetectSummary run_detection(const Corpus& snapshot, const ApplyFn& apply, CompletionClient& judge,
                            const LoanwordLexicon& lexicon, const DetectOptions& options) {
    DetectSummary summary;
    std::vector<const CaptionRecord*> work;
    for (const auto& [id, r] : snapshot.captions()) {
        if (r.status == Status::translated || r.status == Status::flagged) work.push_back(&r);
    }
    if (work.empty()) {
        log::warn("detect: corpus has no translated captions; nothing to do");
        return summary;
    }

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr fatal;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next++;
            if (i >= work.size()) return;
            try {
                FlagRecord rec = judge_caption(*work[i], judge, lexicon, options);
                const bool failed = rec.review_needed && !rec.judge_raw_output;
                const FlagRecord copy = rec;
                apply(rec.caption_id, [&](Corpus& c) {
                    c.record_flags(copy);
                    if (failed) {
                        c.set_note(copy.caption_id, "judge call failed");
                    } else {
                        c.clear_note(copy.caption_id);
                    }
                });
                std::lock_guard lock(mu);
                ++summary.processed;
                if (!rec.categories.empty() || rec.review_needed) ++summary.flagged;
                if (rec.review_needed) ++summary.review_needed;
                if (failed) ++summary.judge_failures;
                for (auto c : kAllCategories) {
                    if (rec.categories.contains(c)) ++summary.per_category[c];
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(judge.config().max_parallel), work.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (fatal) std::rethrow_exception(fatal);
    return summary;
}

}  // namespace

DetectSummary detect_corpus(CorpusStore& store, CompletionClient& judge, const LoanwordLexicon& lexicon,
                            const DetectOptions& options) {
    const Corpus snapshot = store.snapshot();
    return run_detection(
        snapshot, [&](std::string_view id, const std::function<void(Corpus&)>& fn) { store.update(id, fn); }, judge,
        lexicon, options);
}

Corpus detect_corpus(Corpus corpus, CompletionClient& judge, const LoanwordLexicon& lexicon,
                     const DetectOptions& options, DetectSummary* summary) {
    const Corpus snapshot = corpus;
    std::mutex mu;
    auto result = run_detection(
        snapshot,
        [&](std::string_view, const std::function<void(Corpus&)>& fn) {
            std::lock_guard lock(mu);
            fn(corpus);
        },
        judge, lexicon, options);
    if (summary) *summary = result;
    return corpus;
}

}  // namespace autoarabic
