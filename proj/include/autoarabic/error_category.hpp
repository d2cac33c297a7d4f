// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autoarabic {

/// Translation error taxonomy. Serialized tokens are fixed.
enum class ErrorCategory : std::uint8_t {
    lexical,
    literal,
    hallucination,
    tense_shift,
    loanword,
    diacritics,
};

inline constexpr std::size_t kCategoryCount = 6;

inline constexpr std::array<ErrorCategory, kCategoryCount> kAllCategories = {
    ErrorCategory::lexical,     ErrorCategory::literal,  ErrorCategory::hallucination,
    ErrorCategory::tense_shift, ErrorCategory::loanword, ErrorCategory::diacritics,
};

std::string_view to_token(ErrorCategory c) noexcept;
std::optional<ErrorCategory> category_from_token(std::string_view token) noexcept;

/// Small ordered set of categories. Iteration order is token order, which
/// is what the corpus file requires for its sorted `flags` array.
class CategorySet {
public:
    CategorySet() = default;
    CategorySet(std::initializer_list<ErrorCategory> cats) {
        for (auto c : cats) insert(c);
    }

    void insert(ErrorCategory c) noexcept { bits_.set(index(c)); }
    void erase(ErrorCategory c) noexcept { bits_.reset(index(c)); }
    bool contains(ErrorCategory c) const noexcept { return bits_.test(index(c)); }
    bool empty() const noexcept { return bits_.none(); }
    std::size_t size() const noexcept { return bits_.count(); }

    CategorySet& operator|=(const CategorySet& o) noexcept {
        bits_ |= o.bits_;
        return *this;
    }
    friend CategorySet operator|(CategorySet a, const CategorySet& b) noexcept { return a |= b; }
    bool includes(const CategorySet& o) const noexcept { return (bits_ & o.bits_) == o.bits_; }
    bool operator==(const CategorySet&) const = default;

    std::uint8_t mask() const noexcept { return static_cast<std::uint8_t>(bits_.to_ulong()); }
    static CategorySet from_mask(std::uint8_t m) noexcept {
        CategorySet s;
        s.bits_ = std::bitset<kCategoryCount>(m);
        return s;
    }

    /// Tokens sorted lexicographically.
    std::vector<std::string> tokens() const;
    static CategorySet from_tokens(const std::vector<std::string>& tokens);

private:
    static std::size_t index(ErrorCategory c) noexcept { return static_cast<std::size_t>(c); }
    std::bitset<kCategoryCount> bits_;
};

}  // namespace autoarabic
