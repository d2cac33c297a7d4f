// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic::analytics {

double round_to(double value, int digits) {
    const double scale = std::pow(10.0, digits);
    const double scaled = value * scale;
    return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)) / scale;
}

std::string format_fixed(double value, int digits) {
    char buf[64];
    double r = round_to(value, digits);
    if (r == 0.0) r = 0.0;  // no "-0.0"
    std::snprintf(buf, sizeof buf, "%.*f", digits, r);
    return buf;
}

namespace {

std::uint8_t bit(ErrorCategory c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }

double percent(std::size_t n, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total);
}

}  // namespace

// --- error breakdown ---------------------------------------------------------

std::size_t ErrorBreakdown::containing_count(std::uint8_t mask) const {
    std::size_t n = 0;
    for (unsigned m = 0; m < 64; ++m) {
        if ((m & mask) == mask) n += pattern_count[m];
    }
    return n;
}

std::size_t ErrorBreakdown::marginal_count(ErrorCategory c) const { return containing_count(bit(c)); }

std::size_t ErrorBreakdown::pair_count(ErrorCategory a, ErrorCategory b) const {
    return containing_count(static_cast<std::uint8_t>(bit(a) | bit(b)));
}

std::size_t ErrorBreakdown::triple_count(ErrorCategory a, ErrorCategory b, ErrorCategory c) const {
    return containing_count(static_cast<std::uint8_t>(bit(a) | bit(b) | bit(c)));
}

double ErrorBreakdown::marginal_rate(ErrorCategory c) const { return percent(marginal_count(c), total); }
double ErrorBreakdown::pair_rate(ErrorCategory a, ErrorCategory b) const { return percent(pair_count(a, b), total); }
double ErrorBreakdown::triple_rate(ErrorCategory a, ErrorCategory b, ErrorCategory c) const {
    return percent(triple_count(a, b, c), total);
}
double ErrorBreakdown::union_rate() const { return percent(union_count, total); }

double ErrorBreakdown::union_rate_inclusion_exclusion() const {
    double sum = 0.0;
    for (unsigned mask = 1; mask < 64; ++mask) {
        const double term = percent(containing_count(static_cast<std::uint8_t>(mask)), total);
        sum += (std::popcount(mask) % 2 == 1) ? term : -term;
    }
    return sum;
}

ErrorBreakdown error_breakdown(const std::vector<CategorySet>& flags) {
    ErrorBreakdown b;
    b.total = flags.size();
    for (const auto& f : flags) {
        ++b.pattern_count[f.mask()];
        if (!f.empty()) ++b.union_count;
    }
    return b;
}

ErrorBreakdown error_breakdown(const Corpus& corpus) {
    if (corpus.empty()) throw ValidationError("error breakdown needs at least one caption");
    std::vector<CategorySet> flags;
    flags.reserve(corpus.size());
    for (const auto& [id, r] : corpus.captions()) flags.push_back(r.flags);
    return error_breakdown(flags);
}

namespace {

template <typename Emit>
void for_each_breakdown_row(const ErrorBreakdown& b, Emit&& emit) {
    emit("captions", std::to_string(b.total));
    for (auto c : kAllCategories) {
        const std::string name(to_token(c));
        emit("marginal_count." + name, std::to_string(b.marginal_count(c)));
        emit("marginal_rate." + name, format_fixed(b.marginal_rate(c), 1));
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        for (std::size_t j = i + 1; j < kCategoryCount; ++j) {
            const auto a = kAllCategories[i], c = kAllCategories[j];
            const std::string name = std::string(to_token(a)) + "+" + std::string(to_token(c));
            emit("pair_count." + name, std::to_string(b.pair_count(a, c)));
            emit("pair_rate." + name, format_fixed(b.pair_rate(a, c), 1));
        }
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        for (std::size_t j = i + 1; j < kCategoryCount; ++j) {
            for (std::size_t k = j + 1; k < kCategoryCount; ++k) {
                const auto a = kAllCategories[i], c = kAllCategories[j], d = kAllCategories[k];
                const std::string name = std::string(to_token(a)) + "+" + std::string(to_token(c)) + "+" +
                                         std::string(to_token(d));
                emit("triple_count." + name, std::to_string(b.triple_count(a, c, d)));
                emit("triple_rate." + name, format_fixed(b.triple_rate(a, c, d), 1));
            }
        }
    }
    emit("union_count", std::to_string(b.union_count));
    emit("union_rate", format_fixed(b.union_rate(), 1));
}

}  // namespace

std::string to_csv(const ErrorBreakdown& b) {
    std::string out = "name,value\n";
    for_each_breakdown_row(b, [&](const std::string& name, const std::string& value) {
        out += name + "," + value + "\n";
    });
    return out;
}

std::string to_table(const ErrorBreakdown& b) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof line, "%-42s %6s\n", "Error type (captions with >= 1 instance)", "%");
    os << line;
    for (auto c : kAllCategories) {
        std::snprintf(line, sizeof line, "  %-40s %6s\n", std::string(to_token(c)).c_str(),
                      format_fixed(b.marginal_rate(c), 1).c_str());
        os << line;
    }
    std::snprintf(line, sizeof line, "  %-40s %6s\n", "union (any category)", format_fixed(b.union_rate(), 1).c_str());
    os << line;
    std::snprintf(line, sizeof line, "%-42s %6s\n", "Overlap", "%");
    os << line;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        for (std::size_t j = i + 1; j < kCategoryCount; ++j) {
            const auto a = kAllCategories[i], c = kAllCategories[j];
            if (b.pair_count(a, c) == 0) continue;
            const std::string name = std::string(to_token(a)) + " + " + std::string(to_token(c));
            std::snprintf(line, sizeof line, "  %-40s %6s\n", name.c_str(), format_fixed(b.pair_rate(a, c), 1).c_str());
            os << line;
        }
    }
    os << "captions: " << b.total << "\n";
    return os.str();
}

// --- n-grams -------------------------------------------------------------------

std::string_view to_string(Side s) noexcept { return s == Side::source ? "source" : "target"; }

Side side_from_string(std::string_view s) {
    if (s == "source") return Side::source;
    if (s == "target") return Side::target;
    throw ValidationError("unknown side '" + std::string(s) + "' (expected source or target)");
}

std::vector<std::string> side_tokens(const CaptionRecord& record, Side side, const TokenOptions& options) {
    if (side == Side::source) {
        return text::tokenize(options.lowercase_source ? text::ascii_lower(record.source_text) : record.source_text)
            .tokens;
    }
    return text::tokenize(text::strip_diacritics(record.latest_text())).tokens;
}

std::vector<std::vector<std::string>> corpus_tokens(const Corpus& corpus, Side side, const TokenOptions& options) {
    std::vector<std::vector<std::string>> out;
    std::size_t missing = 0;
    for (const auto& [id, r] : corpus.captions()) {
        if (side == Side::target && !r.raw_translation) {
            ++missing;
            continue;
        }
        out.push_back(side_tokens(r, side, options));
    }
    if (side == Side::target && !corpus.empty() && out.empty()) {
        throw ValidationError("target side unavailable: no caption has a translation");
    }
    if (missing > 0) log::warn(std::to_string(missing) + " untranslated captions skipped");
    return out;
}

double WordCountHistogram::mean() const {
    return captions == 0 ? 0.0 : static_cast<double>(tokens) / static_cast<double>(captions);
}

WordCountHistogram wordcount_histogram(const std::vector<std::vector<std::string>>& captions) {
    WordCountHistogram h;
    for (const auto& c : captions) {
        ++h.buckets[c.size()];
        ++h.captions;
        h.tokens += c.size();
    }
    return h;
}

WordCountHistogram wordcount_histogram(const Corpus& corpus, Side side, const TokenOptions& options) {
    return wordcount_histogram(corpus_tokens(corpus, side, options));
}

NgramStats ngram_stats(const std::vector<std::vector<std::string>>& captions, int n_max) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    NgramStats stats;
    stats.lengths = wordcount_histogram(captions);
    for (int n = 1; n <= n_max; ++n) {
        std::unordered_set<std::string> seen;
        for (const auto& tokens : captions) {
            if (tokens.size() < static_cast<std::size_t>(n)) continue;
            for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
                std::string key = tokens[i];
                for (int k = 1; k < n; ++k) {
                    key.push_back('\x1f');
                    key += tokens[i + k];
                }
                seen.insert(std::move(key));
            }
        }
        stats.unique.push_back(seen.size());
    }
    return stats;
}

NgramStats ngram_stats(const Corpus& corpus, Side side, int n_max, const TokenOptions& options) {
    return ngram_stats(corpus_tokens(corpus, side, options), n_max);
}

std::string to_csv(const NgramStats& s, Side side) {
    std::string out = "name,value\n";
    const std::string prefix = std::string(to_string(side)) + ".";
    for (std::size_t n = 0; n < s.unique.size(); ++n) {
        out += prefix + "unique_" + std::to_string(n + 1) + "gram," + std::to_string(s.unique[n]) + "\n";
    }
    return out;
}

std::string to_csv(const WordCountHistogram& h, Side side) {
    std::string out = "name,value\n";
    const std::string prefix = std::string(to_string(side)) + ".";
    out += prefix + "captions," + std::to_string(h.captions) + "\n";
    out += prefix + "mean_tokens," + format_fixed(h.mean(), 1) + "\n";
    for (const auto& [len, count] : h.buckets) {
        out += prefix + "tokens_" + std::to_string(len) + "," + std::to_string(count) + "\n";
    }
    return out;
}

// --- POS -----------------------------------------------------------------------

std::string_view to_string(PosTag t) noexcept {
    switch (t) {
        case PosTag::verb: return "verb";
        case PosTag::noun: return "noun";
        case PosTag::adj: return "adj";
        case PosTag::adv: return "adv";
        case PosTag::other: return "other";
    }
    return "";
}

PosTag pos_tag_from_string(std::string_view s) {
    for (auto t : {PosTag::verb, PosTag::noun, PosTag::adj, PosTag::adv, PosTag::other}) {
        if (to_string(t) == s) return t;
    }
    throw ValidationError("unknown POS tag '" + std::string(s) + "'");
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) return fields;
        start = tab + 1;
    }
}

template <typename F>
void for_each_data_line(std::string_view data, F&& fn) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        std::string_view line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? data.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        fn(line, line_no);
    }
}

}  // namespace

std::vector<TagEntry> parse_tag_file(std::string_view data, const std::string& source_name) {
    std::vector<TagEntry> out;
    for_each_data_line(data, [&](std::string_view line, std::size_t line_no) {
        const auto f = split_tabs(line);
        if (f.size() != 3) throw ParseError(source_name, line_no, "expected caption_id<TAB>token_index<TAB>tag");
        TagEntry e;
        e.caption_id = std::string(f[0]);
        try {
            std::size_t used = 0;
            const std::string idx(f[1]);
            const long long v = std::stoll(idx, &used);
            if (used != idx.size() || v < 0) throw std::invalid_argument("index");
            e.token_index = static_cast<std::size_t>(v);
            e.tag = pos_tag_from_string(f[2]);
        } catch (const ValidationError& err) {
            throw ParseError(source_name, line_no, err.what());
        } catch (const std::exception&) {
            throw ParseError(source_name, line_no, "token_index must be a non-negative integer");
        }
        out.push_back(std::move(e));
    });
    return out;
}

std::map<PosTag, std::size_t> pos_stats(const Corpus& corpus, const std::vector<TagEntry>& tags, Side side,
                                        const TokenOptions& options) {
    std::set<std::string> unknown;
    std::set<std::string> bad_index;
    std::map<PosTag, std::set<std::string>> types;
    std::map<std::string, std::vector<std::string>, std::less<>> token_cache;
    for (const auto& e : tags) {
        const CaptionRecord* r = corpus.find(e.caption_id);
        if (r == nullptr) {
            unknown.insert(e.caption_id);
            continue;
        }
        auto it = token_cache.find(e.caption_id);
        if (it == token_cache.end()) it = token_cache.emplace(e.caption_id, side_tokens(*r, side, options)).first;
        if (e.token_index >= it->second.size()) {
            bad_index.insert(e.caption_id + ":" + std::to_string(e.token_index));
            continue;
        }
        types[e.tag].insert(text::strip_diacritics(it->second[e.token_index]));
    }
    if (!unknown.empty()) {
        throw RecordValidationError("tag file references unknown captions",
                                    std::vector<std::string>(unknown.begin(), unknown.end()));
    }
    if (!bad_index.empty()) {
        throw RecordValidationError("tag file token index out of range",
                                    std::vector<std::string>(bad_index.begin(), bad_index.end()));
    }
    std::map<PosTag, std::size_t> out;
    for (auto t : {PosTag::verb, PosTag::noun, PosTag::adj, PosTag::adv, PosTag::other}) out[t] = types[t].size();
    return out;
}

std::string to_csv(const std::map<PosTag, std::size_t>& counts) {
    std::string out = "name,value\n";
    for (const auto& [tag, n] : counts) out += "unique_" + std::string(to_string(tag)) + "," + std::to_string(n) + "\n";
    return out;
}

// --- detector evaluation -------------------------------------------------------

std::string_view to_string(DetectorClass c) noexcept {
    switch (c) {
        case DetectorClass::diacritics: return "diacritics";
        case DetectorClass::hallucination_literal: return "hallucination_literal";
        case DetectorClass::loanword: return "loanword";
        case DetectorClass::no_error: return "no_error";
        case DetectorClass::tense_shifting: return "tense_shifting";
    }
    return "";
}

DetectorLabels detector_labels(const CategorySet& c) {
    DetectorLabels l{};
    auto set = [&](DetectorClass k) { l[static_cast<std::size_t>(k)] = true; };
    if (c.contains(ErrorCategory::diacritics)) set(DetectorClass::diacritics);
    if (c.contains(ErrorCategory::hallucination) || c.contains(ErrorCategory::literal) ||
        c.contains(ErrorCategory::lexical)) {
        set(DetectorClass::hallucination_literal);
    }
    if (c.contains(ErrorCategory::loanword)) set(DetectorClass::loanword);
    if (c.contains(ErrorCategory::tense_shift)) set(DetectorClass::tense_shifting);
    if (c.empty()) set(DetectorClass::no_error);
    return l;
}

DetectorReport detector_report(const std::vector<DetectorLabels>& gold, const std::vector<DetectorLabels>& predicted) {
    if (gold.size() != predicted.size()) throw ValidationError("gold and predicted label counts differ");
    DetectorReport r;
    r.items = gold.size();

    std::size_t exact = 0;
    std::size_t correct_decisions = 0;
    bool single_label = true;
    std::array<std::array<std::size_t, kDetectorClassCount>, kDetectorClassCount> confusion{};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == predicted[i]) ++exact;
        std::size_t g_count = 0, p_count = 0, g_class = 0, p_class = 0;
        for (std::size_t k = 0; k < kDetectorClassCount; ++k) {
            const bool g = gold[i][k], p = predicted[i][k];
            auto& m = r.per_class[k];
            if (g && p) ++m.true_positive;
            if (!g && p) ++m.false_positive;
            if (g && !p) ++m.false_negative;
            if (g == p) ++correct_decisions;
            if (g) ++g_count, g_class = k;
            if (p) ++p_count, p_class = k;
        }
        if (g_count == 1 && p_count == 1) {
            ++confusion[g_class][p_class];
        } else {
            single_label = false;
        }
    }

    for (auto& m : r.per_class) {
        const bool absent = m.true_positive + m.false_positive + m.false_negative == 0;
        const double vacuous = absent ? 1.0 : 0.0;
        const auto tp = static_cast<double>(m.true_positive);
        const std::size_t pd = m.true_positive + m.false_positive;
        const std::size_t rd = m.true_positive + m.false_negative;
        m.precision = pd == 0 ? vacuous : tp / static_cast<double>(pd);
        m.recall = rd == 0 ? vacuous : tp / static_cast<double>(rd);
        m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        r.macro_precision += m.precision / kDetectorClassCount;
        r.macro_recall += m.recall / kDetectorClassCount;
        r.macro_f1 += m.f1 / kDetectorClassCount;
    }
    if (r.items > 0) {
        r.exact_set_accuracy = static_cast<double>(exact) / static_cast<double>(r.items);
        r.decision_accuracy =
            static_cast<double>(correct_decisions) / static_cast<double>(r.items * kDetectorClassCount);
        if (single_label) r.confusion = confusion;
    }
    return r;
}

DetectorReport detector_report(const std::map<std::string, CategorySet>& gold,
                               const std::map<std::string, CategorySet>& predicted) {
    std::vector<std::string> mismatched;
    for (const auto& [id, c] : gold) {
        if (!predicted.contains(id)) mismatched.push_back(id);
    }
    for (const auto& [id, c] : predicted) {
        if (!gold.contains(id)) mismatched.push_back(id);
    }
    if (!mismatched.empty()) {
        std::sort(mismatched.begin(), mismatched.end());
        throw RecordValidationError("gold and predicted cover different caption ids", std::move(mismatched));
    }
    std::vector<DetectorLabels> g, p;
    for (const auto& [id, c] : gold) {
        g.push_back(detector_labels(c));
        p.push_back(detector_labels(predicted.at(id)));
    }
    return detector_report(g, p);
}

std::map<std::string, CategorySet> parse_label_file(std::string_view data, const std::string& source_name) {
    std::map<std::string, CategorySet> out;
    for_each_data_line(data, [&](std::string_view line, std::size_t line_no) {
        const auto f = split_tabs(line);
        if (f.size() != 2) throw ParseError(source_name, line_no, "expected caption_id<TAB>categories");
        CategorySet cats;
        if (f[1] != "none" && f[1] != "no_error" && !f[1].empty()) {
            std::size_t start = 0;
            while (true) {
                const auto comma = f[1].find(',', start);
                const auto tok = f[1].substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
                auto c = category_from_token(tok);
                if (!c) throw ParseError(source_name, line_no, "unknown category '" + std::string(tok) + "'");
                cats.insert(*c);
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
        }
        if (!out.emplace(std::string(f[0]), cats).second) {
            throw ParseError(source_name, line_no, "duplicate caption id '" + std::string(f[0]) + "'");
        }
    });
    return out;
}

std::map<std::string, CategorySet> predicted_labels(const Corpus& corpus) {
    std::map<std::string, CategorySet> out;
    for (const auto& [id, f] : corpus.flag_records()) out.emplace(id, f.categories);
    return out;
}

std::string to_csv(const DetectorReport& r) {
    std::string out = "name,value\n";
    for (auto c : kAllDetectorClasses) {
        const auto& m = r[c];
        const std::string name(to_string(c));
        out += name + ".precision," + format_fixed(m.precision, 4) + "\n";
        out += name + ".recall," + format_fixed(m.recall, 4) + "\n";
        out += name + ".f1," + format_fixed(m.f1, 4) + "\n";
    }
    out += "macro.precision," + format_fixed(r.macro_precision, 4) + "\n";
    out += "macro.recall," + format_fixed(r.macro_recall, 4) + "\n";
    out += "macro.f1," + format_fixed(r.macro_f1, 4) + "\n";
    out += "accuracy.exact_set," + format_fixed(r.exact_set_accuracy, 4) + "\n";
    out += "accuracy.per_decision," + format_fixed(r.decision_accuracy, 4) + "\n";
    out += "items," + std::to_string(r.items) + "\n";
    return out;
}

std::string to_table(const DetectorReport& r) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof line, "%-24s %9s %9s %9s\n", "Class", "Precision", "Recall", "F1");
    os << line;
    for (auto c : kAllDetectorClasses) {
        const auto& m = r[c];
        std::snprintf(line, sizeof line, "%-24s %9s %9s %9s\n", std::string(to_string(c)).c_str(),
                      format_fixed(m.precision, 2).c_str(), format_fixed(m.recall, 2).c_str(),
                      format_fixed(m.f1, 2).c_str());
        os << line;
    }
    std::snprintf(line, sizeof line, "%-24s %9s %9s %9s\n", "Overall (macro-avg)", format_fixed(r.macro_precision, 2).c_str(),
                  format_fixed(r.macro_recall, 2).c_str(), format_fixed(r.macro_f1, 2).c_str());
    os << line;
    os << "accuracy (exact set): " << format_fixed(r.exact_set_accuracy, 4)
       << "  accuracy (per decision): " << format_fixed(r.decision_accuracy, 4) << "  items: " << r.items << "\n";
    return os.str();
}

}  // namespace autoarabic::analytics
