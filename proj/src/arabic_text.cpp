// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/arabic_text.hpp"

#include <algorithm>

namespace autoarabic::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Returns the number of bytes consumed (>= 1) and writes the codepoint.
std::size_t decode_one(std::string_view s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t value = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        value = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        value = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        value = b0 & 0x07;
    } else {
        cp = kReplacement;
        return 1;
    }
    if (i + len > s.size()) {
        cp = kReplacement;
        return 1;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            cp = kReplacement;
            return 1;
        }
        value = (value << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (value < kMin[len] || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
        cp = kReplacement;
        return 1;
    }
    cp = value;
    return len;
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        char32_t cp = 0;
        i += decode_one(text, i, cp);
        out.push_back(cp);
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(std::u32string_view codepoints) {
    std::string out;
    out.reserve(codepoints.size() * 2);
    for (char32_t cp : codepoints) append_utf8(out, cp);
    return out;
}

bool is_valid_utf8(std::string_view text) {
    for (std::size_t i = 0; i < text.size();) {
        char32_t cp = 0;
        const std::size_t n = decode_one(text, i, cp);
        if (cp == kReplacement && !(n == 3 && text.substr(i, 3) == "\xEF\xBF\xBD")) return false;
        i += n;
    }
    return true;
}

bool is_unicode_space(char32_t cp) noexcept {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_edge_punctuation(char32_t cp) noexcept {
    switch (cp) {
        case U'.': case U',': case U';': case U'?': case U'!':
        case U'"': case U'\'': case U'(': case U')': case U':':
        case 0x060C:  // arabic comma
        case 0x061B:  // arabic semicolon
        case 0x061F:  // arabic question mark
        case 0x06D4:  // arabic full stop
        case 0x00AB: case 0x00BB:  // guillemets
        case 0x201C: case 0x201D: case 0x2018: case 0x2019:
            return true;
        default:
            return false;
    }
}

std::string strip_diacritics(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        char32_t cp = 0;
        const std::size_t n = decode_one(text, i, cp);
        if (!is_diacritic(cp)) out.append(text.substr(i, n));
        i += n;
    }
    return out;
}

bool has_diacritics(std::string_view text) {
    for (std::size_t i = 0; i < text.size();) {
        char32_t cp = 0;
        i += decode_one(text, i, cp);
        if (is_diacritic(cp)) return true;
    }
    return false;
}

TokenSequence tokenize(std::string_view text) {
    TokenSequence seq;
    seq.provenance = std::string(text);

    const std::u32string cps = decode_utf8(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_unicode_space(cps[i])) ++i;
        std::size_t begin = i;
        while (i < cps.size() && !is_unicode_space(cps[i])) ++i;
        std::size_t end = i;
        while (begin < end && is_edge_punctuation(cps[begin])) ++begin;
        while (end > begin && is_edge_punctuation(cps[end - 1])) --end;
        const auto content = std::u32string_view(cps).substr(begin, end - begin);
        const bool has_base = std::any_of(content.begin(), content.end(), [](char32_t cp) {
            return !is_diacritic(cp) && !is_edge_punctuation(cp);
        });
        if (has_base) {
            seq.tokens.push_back(encode_utf8(std::u32string_view(cps).substr(begin, end - begin)));
        }
    }
    return seq;
}

std::string normalize_for_compare(std::string_view text) {
    const std::u32string cps = decode_utf8(strip_diacritics(text));
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char32_t cp : cps) {
        if (is_unicode_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        append_utf8(out, cp);
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace autoarabic::text
