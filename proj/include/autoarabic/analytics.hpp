// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoarabic/corpus.hpp"

namespace autoarabic::analytics {

/// Round half away from zero to `digits` decimals.
double round_to(double value, int digits);
/// Fixed-point text with `digits` decimals.
std::string format_fixed(double value, int digits);

// --- error breakdown ---------------------------------------------------------

/// Per-category error rates over a caption population. Rates are
/// percentages of `total`; marginal/pair/triple rates count captions whose
/// flag set contains the category (or categories), so they overlap.
struct ErrorBreakdown {
    std::size_t total = 0;
    /// Captions whose flag set is exactly the bitmask (CategorySet::mask()).
    std::array<std::size_t, 64> pattern_count{};
    std::size_t union_count = 0;

    /// Captions whose flag set contains every category in `mask`.
    std::size_t containing_count(std::uint8_t mask) const;
    std::size_t marginal_count(ErrorCategory c) const;
    std::size_t pair_count(ErrorCategory a, ErrorCategory b) const;
    std::size_t triple_count(ErrorCategory a, ErrorCategory b, ErrorCategory c) const;

    double marginal_rate(ErrorCategory c) const;
    double pair_rate(ErrorCategory a, ErrorCategory b) const;
    double triple_rate(ErrorCategory a, ErrorCategory b, ErrorCategory c) const;
    /// Directly counted union.
    double union_rate() const;
    /// Union recomputed by inclusion-exclusion over all intersection terms.
    double union_rate_inclusion_exclusion() const;
};

ErrorBreakdown error_breakdown(const std::vector<CategorySet>& flags);
/// Over every caption in the corpus; throws ValidationError when empty.
ErrorBreakdown error_breakdown(const Corpus& corpus);

/// `name,value` rows: counts exact, rates to one decimal.
std::string to_csv(const ErrorBreakdown& b);
std::string to_table(const ErrorBreakdown& b);

// --- n-grams and word counts ---------------------------------------------------

enum class Side { source, target };
std::string_view to_string(Side s) noexcept;
Side side_from_string(std::string_view s);

struct TokenOptions {
    /// Lowercase the English side before counting.
    bool lowercase_source = true;
};

/// Tokens of one caption side: plain tokenization for the source,
/// tokenization of the diacritics-stripped latest text for the target.
std::vector<std::string> side_tokens(const CaptionRecord& record, Side side, const TokenOptions& options = {});

/// Token lists of every caption on `side`. Target side needs at least one
/// translation when the corpus is non-empty; untranslated captions are
/// skipped.
std::vector<std::vector<std::string>> corpus_tokens(const Corpus& corpus, Side side, const TokenOptions& options = {});

struct WordCountHistogram {
    std::map<std::size_t, std::size_t> buckets;
    std::size_t captions = 0;
    std::size_t tokens = 0;
    double mean() const;
};

WordCountHistogram wordcount_histogram(const std::vector<std::vector<std::string>>& captions);
WordCountHistogram wordcount_histogram(const Corpus& corpus, Side side, const TokenOptions& options = {});

struct NgramStats {
    /// unique[n - 1] = distinct n-grams, windows never crossing captions.
    std::vector<std::size_t> unique;
    WordCountHistogram lengths;
};

NgramStats ngram_stats(const std::vector<std::vector<std::string>>& captions, int n_max = 4);
NgramStats ngram_stats(const Corpus& corpus, Side side, int n_max = 4, const TokenOptions& options = {});

std::string to_csv(const NgramStats& s, Side side);
std::string to_csv(const WordCountHistogram& h, Side side);

// --- POS -----------------------------------------------------------------------

enum class PosTag { verb, noun, adj, adv, other };
std::string_view to_string(PosTag t) noexcept;
PosTag pos_tag_from_string(std::string_view s);

struct TagEntry {
    std::string caption_id;
    std::size_t token_index = 0;
    PosTag tag = PosTag::other;
};

/// `caption_id<TAB>token_index<TAB>tag` lines; `#` comments allowed.
std::vector<TagEntry> parse_tag_file(std::string_view data, const std::string& source_name);

/// Distinct diacritics-stripped surface forms per tag. Throws
/// RecordValidationError listing unknown caption ids or bad token indices.
std::map<PosTag, std::size_t> pos_stats(const Corpus& corpus, const std::vector<TagEntry>& tags, Side side,
                                        const TokenOptions& options = {});
std::string to_csv(const std::map<PosTag, std::size_t>& counts);

// --- detector evaluation -------------------------------------------------------

/// Evaluation classes: hallucination, literal and lexical merge into one
/// class; a caption without flags is no_error.
enum class DetectorClass { diacritics, hallucination_literal, loanword, no_error, tense_shifting };
inline constexpr std::size_t kDetectorClassCount = 5;
inline constexpr std::array<DetectorClass, kDetectorClassCount> kAllDetectorClasses = {
    DetectorClass::diacritics, DetectorClass::hallucination_literal, DetectorClass::loanword,
    DetectorClass::no_error, DetectorClass::tense_shifting};

std::string_view to_string(DetectorClass c) noexcept;

using DetectorLabels = std::array<bool, kDetectorClassCount>;
DetectorLabels detector_labels(const CategorySet& categories);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
};

struct DetectorReport {
    std::array<ClassMetrics, kDetectorClassCount> per_class{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    /// Fraction of captions whose whole predicted class set equals gold.
    double exact_set_accuracy = 0.0;
    /// Fraction of correct (caption, class) binary decisions.
    double decision_accuracy = 0.0;
    std::size_t items = 0;
    /// gold x predicted counts; present when every caption has exactly one
    /// class on both sides.
    std::optional<std::array<std::array<std::size_t, kDetectorClassCount>, kDetectorClassCount>> confusion;

    const ClassMetrics& operator[](DetectorClass c) const { return per_class[static_cast<std::size_t>(c)]; }
};

/// Per-(caption, class) binary decisions. A metric whose denominator is
/// zero is 1.0 when the class is absent from both sides, else 0.0.
DetectorReport detector_report(const std::vector<DetectorLabels>& gold, const std::vector<DetectorLabels>& predicted);
/// Keys must match exactly; mismatches raise RecordValidationError.
DetectorReport detector_report(const std::map<std::string, CategorySet>& gold,
                               const std::map<std::string, CategorySet>& predicted);

/// Gold label file: `caption_id<TAB>cat1,cat2` or `caption_id<TAB>none`.
std::map<std::string, CategorySet> parse_label_file(std::string_view data, const std::string& source_name);
/// Detector predictions from the corpus FlagRecords.
std::map<std::string, CategorySet> predicted_labels(const Corpus& corpus);

std::string to_csv(const DetectorReport& r);
std::string to_table(const DetectorReport& r);

}  // namespace autoarabic::analytics
