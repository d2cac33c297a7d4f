// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "autoarabic/corpus.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/provider.hpp"
#include "autoarabic/translate.hpp"

namespace autoarabic {

enum class LoanwordPolicy { keep, replace, flag_only };

std::string_view to_string(LoanwordPolicy p) noexcept;
LoanwordPolicy loanword_policy_from_string(std::string_view s);

struct LoanwordEntry {
    std::string surface;
    std::string preferred;
    LoanwordPolicy policy = LoanwordPolicy::flag_only;
};

/// Loanword lexicon keyed by diacritics-free surface form.
///
/// File format: UTF-8, one `surface<TAB>preferred<TAB>policy` entry per
/// line, `#` starts a comment line, blank lines ignored.
class LoanwordLexicon {
public:
    /// Ships the camera example: كاميرا kept over آلة التصوير.
    static LoanwordLexicon seed();
    static LoanwordLexicon parse(std::string_view data, const std::string& source_name);
    static LoanwordLexicon load(const std::filesystem::path& path);

    /// Throws ValidationError on a duplicate surface form.
    void add(LoanwordEntry entry);
    /// Later entries replace earlier ones with the same surface.
    void merge(const LoanwordLexicon& other);

    const LoanwordEntry* find(std::string_view surface) const;
    const std::map<std::string, LoanwordEntry, std::less<>>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::map<std::string, LoanwordEntry, std::less<>> entries_;
};

struct LoanwordMatch {
    LoanwordEntry entry;
    std::size_t token_index = 0;
    std::string token;
};

/// Text a detector looks at: the current text if set, else the raw one.
const std::string& detection_text(const CaptionRecord& caption);

bool detect_diacritics_flag(const CaptionRecord& caption);

/// Lexicon entries occurring as whole tokens of the diacritics-stripped
/// text. A token may carry the definite article (ال, وال, بال, فال, كال, لل).
std::vector<LoanwordMatch> detect_loanword_matches(const CaptionRecord& caption, const LoanwordLexicon& lexicon);
/// True iff some match has a policy other than keep.
bool loanword_flag(const std::vector<LoanwordMatch>& matches);

struct DetectOptions {
    double partial_ratio = kDefaultPartialRatio;
    Clock clock = system_now;
};

/// Deterministic sub-detectors only: diacritics, loanword, and partial
/// translation (reported as literal).
FlagRecord rule_flags(const CaptionRecord& caption, const LoanwordLexicon& lexicon, const DetectOptions& options = {});

/// Rule flags unioned with the judge's answer. The judge can add
/// categories but never remove a rule flag. An unparseable answer or a
/// failed judge call marks the record review_needed.
FlagRecord judge_caption(const CaptionRecord& caption, CompletionClient& judge, const LoanwordLexicon& lexicon,
                         const DetectOptions& options = {});

struct DetectSummary {
    std::size_t processed = 0;
    std::size_t flagged = 0;
    std::size_t review_needed = 0;
    std::size_t judge_failures = 0;
    std::map<ErrorCategory, std::size_t> per_category;
};

/// Runs detection over every translated or flagged caption, replacing any
/// previous FlagRecord.
DetectSummary detect_corpus(CorpusStore& store, CompletionClient& judge, const LoanwordLexicon& lexicon,
                            const DetectOptions& options = {});
Corpus detect_corpus(Corpus corpus, CompletionClient& judge, const LoanwordLexicon& lexicon,
                     const DetectOptions& options = {}, DetectSummary* summary = nullptr);

}  // namespace autoarabic
