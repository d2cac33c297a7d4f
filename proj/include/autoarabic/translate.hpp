// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

#include "autoarabic/corpus.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/provider.hpp"

namespace autoarabic {

/// The phrase ("in Arabic") the translator sometimes appends.
inline constexpr std::string_view kArabicSuffixPhrase = "باللغة العربية";
inline constexpr std::string_view kSuffixCleanupAnnotator = "auto:suffix-cleanup";
inline constexpr double kDefaultPartialRatio = 0.3;

struct SuffixCleanup {
    std::string text;
    bool removed = false;
};

/// Drops the suffix phrase when it ends the text (after optional
/// whitespace, before optional terminal punctuation) and re-attaches the
/// punctuation. Repeated trailing copies are all removed, so the function
/// is idempotent. A text that is nothing but the phrase is left alone.
SuffixCleanup clean_suffix_artifact(std::string_view text);

/// |tokens(translation)| / |tokens(source)| < ratio_threshold.
bool detect_partial_translation(std::string_view source, std::string_view translation,
                                double ratio_threshold = kDefaultPartialRatio);

struct TranslateOptions {
    /// Skip captions that already carry a translation. When false the
    /// corpus must not contain any translation yet.
    bool resume = true;
    /// Stop after this many captions complete in this run.
    std::size_t limit = std::numeric_limits<std::size_t>::max();
    Clock clock = system_now;
};

struct TranslateSummary {
    std::size_t translated = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;
    std::size_t suffix_removed = 0;
};

/// Translates every pending caption through `client`, checkpointing each
/// completed caption into the store's journal. Provider failures leave
/// the caption pending with a note; the run continues.
TranslateSummary translate_corpus(CorpusStore& store, CompletionClient& client, const TranslateOptions& options = {});

/// In-memory variant.
Corpus translate_corpus(Corpus corpus, CompletionClient& client, const TranslateOptions& options = {},
                        TranslateSummary* summary = nullptr);

}  // namespace autoarabic
