// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/error_category.hpp"

#include <algorithm>

#include "autoarabic/errors.hpp"

namespace autoarabic {

std::string_view to_token(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::lexical: return "lexical";
        case ErrorCategory::literal: return "literal";
        case ErrorCategory::hallucination: return "hallucination";
        case ErrorCategory::tense_shift: return "tense_shift";
        case ErrorCategory::loanword: return "loanword";
        case ErrorCategory::diacritics: return "diacritics";
    }
    return "";
}

std::optional<ErrorCategory> category_from_token(std::string_view token) noexcept {
    for (auto c : kAllCategories) {
        if (to_token(c) == token) return c;
    }
    return std::nullopt;
}

std::vector<std::string> CategorySet::tokens() const {
    std::vector<std::string> out;
    for (auto c : kAllCategories) {
        if (contains(c)) out.emplace_back(to_token(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

CategorySet CategorySet::from_tokens(const std::vector<std::string>& tokens) {
    CategorySet s;
    for (const auto& t : tokens) {
        auto c = category_from_token(t);
        if (!c) throw ValidationError("unknown error category '" + t + "'");
        s.insert(*c);
    }
    return s;
}

}  // namespace autoarabic
