// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace autoarabic::text {

/// Decoded codepoints of a UTF-8 string. Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);
bool is_valid_utf8(std::string_view text);

/// Tashkeel U+064B..U+0655, superscript alef U+0670 and tatweel U+0640.
constexpr bool is_diacritic(char32_t cp) noexcept {
    return (cp >= 0x064B && cp <= 0x0655) || cp == 0x0670 || cp == 0x0640;
}

bool is_unicode_space(char32_t cp) noexcept;

/// Punctuation trimmed from token edges: . ، ؛ ؟ ! " ' ( ) : plus the
/// ASCII comma, semicolon and question mark.
bool is_edge_punctuation(char32_t cp) noexcept;

std::string strip_diacritics(std::string_view text);
bool has_diacritics(std::string_view text);

struct TokenSequence {
    std::vector<std::string> tokens;
    std::string provenance;

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

/// Whitespace split, edge punctuation trimmed, empty tokens dropped. A
/// token made only of diacritics and punctuation counts as empty.
/// Script-agnostic; diacritics are kept.
TokenSequence tokenize(std::string_view text);

/// strip_diacritics, collapse whitespace runs to a single space, trim.
std::string normalize_for_compare(std::string_view text);

/// ASCII lowercase; non-ASCII bytes pass through.
std::string ascii_lower(std::string_view text);

}  // namespace autoarabic::text
