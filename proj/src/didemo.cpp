// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/didemo.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "autoarabic/corpus_store.hpp"
#include "autoarabic/errors.hpp"

namespace autoarabic {

namespace {

using nlohmann::json;

struct RawRecord {
    std::size_t line = 0;
    std::string_view text;
};

std::size_t count_newlines(std::string_view s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Splits a top-level JSON array (or newline-delimited objects) into the
// byte ranges of its elements, remembering each element's first line.
std::vector<RawRecord> split_records(std::string_view data, const std::string& file) {
    std::vector<RawRecord> out;
    std::size_t pos = 0;
    std::size_t line = 1;
    auto skip_ws = [&] {
        while (pos < data.size() && is_ws(data[pos])) {
            if (data[pos] == '\n') ++line;
            ++pos;
        }
    };
    auto scan_object = [&]() -> RawRecord {
        if (data[pos] != '{') throw ParseError(file, line, "expected '{' at start of record");
        RawRecord rec{line, {}};
        const std::size_t begin = pos;
        int depth = 0;
        bool in_string = false;
        for (; pos < data.size(); ++pos) {
            const char c = data[pos];
            if (c == '\n') ++line;
            if (in_string) {
                if (c == '\\') {
                    ++pos;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{' || c == '[') {
                ++depth;
            } else if (c == '}' || c == ']') {
                if (--depth == 0) {
                    ++pos;
                    rec.text = data.substr(begin, pos - begin);
                    return rec;
                }
            }
        }
        throw ParseError(file, rec.line, "unterminated record");
    };

    skip_ws();
    if (pos >= data.size()) return out;
    if (data[pos] == '[') {
        ++pos;
        skip_ws();
        if (pos < data.size() && data[pos] == ']') return out;
        while (true) {
            skip_ws();
            if (pos >= data.size()) throw ParseError(file, line, "unexpected end of file inside array");
            out.push_back(scan_object());
            skip_ws();
            if (pos >= data.size()) throw ParseError(file, line, "unexpected end of file inside array");
            if (data[pos] == ',') {
                ++pos;
                continue;
            }
            if (data[pos] == ']') {
                ++pos;
                break;
            }
            throw ParseError(file, line, "expected ',' or ']' between records");
        }
        skip_ws();
        if (pos < data.size()) throw ParseError(file, line, "trailing content after array");
        return out;
    }
    while (pos < data.size()) {
        out.push_back(scan_object());
        skip_ws();
    }
    return out;
}

struct ParsedRecord {
    std::string video_id;
    std::string description;
    int start = 0;
    int end = 0;
    std::optional<int> num_segments;
    std::optional<std::string> annotation_id;
    std::size_t line = 0;
};

std::pair<int, int> consensus_moment(const json& times) {
    std::map<std::pair<int, int>, int> counts;
    std::vector<std::pair<int, int>> order;
    for (const auto& t : times) {
        if (!t.is_array() || t.size() != 2) throw ValidationError("each entry of 'times' must be [start, end]");
        const std::pair<int, int> p{t[0].get<int>(), t[1].get<int>()};
        if (counts[p]++ == 0) order.push_back(p);
    }
    if (order.empty()) throw ValidationError("'times' is empty");
    std::pair<int, int> best = order.front();
    for (const auto& p : order) {
        if (counts[p] > counts[best]) best = p;
    }
    return best;
}

ParsedRecord parse_record(const RawRecord& raw, const std::string& file) {
    json j;
    try {
        j = json::parse(raw.text);
    } catch (const json::parse_error& e) {
        const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, raw.text.size());
        throw ParseError(file, raw.line + count_newlines(raw.text.substr(0, offset)), e.what());
    }
    ParsedRecord r;
    r.line = raw.line;
    try {
        if (j.contains("video_id")) {
            r.video_id = j.at("video_id").get<std::string>();
        } else {
            r.video_id = j.at("video").get<std::string>();
        }
        r.description = j.at("description").get<std::string>();
        if (j.contains("start_segment") || j.contains("end_segment")) {
            r.start = j.at("start_segment").get<int>();
            r.end = j.at("end_segment").get<int>();
        } else {
            std::tie(r.start, r.end) = consensus_moment(j.at("times"));
        }
        if (j.contains("num_segments") && !j["num_segments"].is_null()) r.num_segments = j["num_segments"].get<int>();
        if (j.contains("annotation_id") && !j["annotation_id"].is_null()) {
            const auto& a = j["annotation_id"];
            r.annotation_id = a.is_string() ? a.get<std::string>() : a.dump();
        }
    } catch (const json::exception& e) {
        throw ParseError(file, raw.line, e.what());
    } catch (const ValidationError& e) {
        throw ParseError(file, raw.line, e.what());
    }
    if (r.description.empty()) throw ParseError(file, raw.line, "empty description");
    if (r.video_id.empty()) throw ParseError(file, raw.line, "empty video id");
    return r;
}

}  // namespace

Corpus ingest_didemo(const std::vector<DidemoSource>& sources) {
    Corpus corpus;
    std::map<std::string, VideoRef> videos;
    std::map<std::string, int> moment_ordinals;
    std::set<std::string> annotation_ids;
    std::vector<CaptionRecord> records;
    std::vector<std::string> out_of_range;
    std::vector<std::string> duplicates;

    for (const auto& src : sources) {
        const std::string file = src.path.string();
        const std::string data = read_file(src.path);
        for (const auto& raw : split_records(data, file)) {
            ParsedRecord p = parse_record(raw, file);

            auto [vit, inserted] = videos.try_emplace(p.video_id, VideoRef{p.video_id, src.split, p.num_segments.value_or(6)});
            VideoRef& video = vit->second;
            if (!inserted) {
                if (video.split != src.split) {
                    throw ParseError(file, p.line, "video " + p.video_id + " already assigned to split " +
                                                       std::string(to_string(video.split)));
                }
                if (p.num_segments && *p.num_segments != video.duration_segments) {
                    throw ParseError(file, p.line, "video " + p.video_id + " has conflicting num_segments");
                }
            }
            if (video.duration_segments < 1) throw ParseError(file, p.line, "num_segments must be >= 1");

            const Moment m{p.video_id, p.start, p.end};
            const std::string moment_key = make_caption_id(m, 0);
            const int ordinal = moment_ordinals[moment_key]++;
            CaptionRecord rec;
            rec.caption_id = make_caption_id(m, ordinal);
            rec.moment = m;
            rec.split = src.split;
            rec.source_text = std::move(p.description);

            if (p.annotation_id && !annotation_ids.insert(*p.annotation_id).second) {
                duplicates.push_back(rec.caption_id);
            }
            if (p.start < 0 || p.end < p.start || p.end >= video.duration_segments) {
                out_of_range.push_back(rec.caption_id);
            }
            records.push_back(std::move(rec));
        }
    }
    if (!duplicates.empty()) throw RecordValidationError("duplicate annotation ids", std::move(duplicates));
    if (!out_of_range.empty()) throw RecordValidationError("segment out of range", std::move(out_of_range));

    for (auto& [id, v] : videos) corpus.add_video(std::move(v));
    for (auto& r : records) corpus.add_caption(std::move(r));
    return corpus;
}

}  // namespace autoarabic
