// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/corpus.hpp"

#include <cstdio>
#include <ctime>
#include <set>
#include <tuple>

#include "autoarabic/errors.hpp"

namespace autoarabic {

Timestamp system_now() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

Clock fixed_clock(Timestamp t) {
    return [t] { return t; };
}

std::string format_rfc3339(Timestamp t) {
    const std::time_t tt = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

Timestamp parse_rfc3339(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char tail = 0;
    const std::string str(s);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &se, &tail) != 7 ||
        tail != 'Z' || str.size() != 20) {
        throw ValidationError("not an RFC-3339 UTC timestamp: '" + str + "'");
    }
    using namespace std::chrono;
    const auto day = year_month_day{year{y}, month{static_cast<unsigned>(mo)}, std::chrono::day{static_cast<unsigned>(d)}};
    if (!day.ok() || h > 23 || mi > 59 || se > 60) {
        throw ValidationError("invalid timestamp: '" + str + "'");
    }
    return sys_days{day} + hours{h} + minutes{mi} + seconds{se};
}

std::string_view to_string(Split s) noexcept {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "";
}

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::pending: return "pending";
        case Status::translated: return "translated";
        case Status::flagged: return "flagged";
        case Status::edited: return "edited";
        case Status::approved: return "approved";
    }
    return "";
}

Split split_from_string(std::string_view s) {
    for (auto v : {Split::train, Split::validation, Split::test}) {
        if (to_string(v) == s) return v;
    }
    throw ValidationError("unknown split '" + std::string(s) + "'");
}

Status status_from_string(std::string_view s) {
    for (auto v : {Status::pending, Status::translated, Status::flagged, Status::edited, Status::approved}) {
        if (to_string(v) == s) return v;
    }
    throw ValidationError("unknown status '" + std::string(s) + "'");
}

std::string_view to_string(FlagSource s) noexcept {
    return s == FlagSource::rule ? "rule" : "judge";
}

FlagSource flag_source_from_string(std::string_view s) {
    if (s == "rule") return FlagSource::rule;
    if (s == "judge") return FlagSource::judge;
    throw ValidationError("unknown flag source '" + std::string(s) + "'");
}

const std::string& CaptionRecord::latest_text() const noexcept {
    static const std::string kEmpty;
    if (current_text) return *current_text;
    if (raw_translation) return *raw_translation;
    return kEmpty;
}

bool CaptionRecord::has_text_edits() const noexcept {
    for (const auto& e : history) {
        if (!e.is_approval()) return true;
    }
    return false;
}

std::string make_caption_id(const Moment& m, int ordinal) {
    return m.video_id + "#" + std::to_string(m.start_segment) + "-" + std::to_string(m.end_segment) + "#" +
           std::to_string(ordinal);
}

bool is_allowed_transition(Status from, Status to) noexcept {
    using S = Status;
    switch (from) {
        case S::pending:
            return to == S::translated;
        case S::translated:
            return to == S::translated || to == S::flagged || to == S::approved || to == S::edited;
        case S::flagged:
            return to == S::flagged || to == S::translated || to == S::edited || to == S::approved;
        case S::edited:
            return to == S::edited || to == S::approved;
        case S::approved:
            return false;
    }
    return false;
}

namespace {

void require_transition(const CaptionRecord& r, Status to) {
    if (!is_allowed_transition(r.status, to)) {
        throw ConflictError("caption " + r.caption_id + ": illegal status transition " +
                            std::string(to_string(r.status)) + " -> " + std::string(to_string(to)));
    }
}

}  // namespace

void Corpus::add_video(VideoRef video) {
    if (video.duration_segments < 1) {
        throw ValidationError("video " + video.video_id + ": duration_segments must be >= 1");
    }
    auto it = videos_.find(video.video_id);
    if (it != videos_.end()) {
        if (it->second != video) {
            throw ValidationError("video " + video.video_id + " registered twice with different metadata");
        }
        return;
    }
    auto id = video.video_id;
    videos_.emplace(std::move(id), std::move(video));
}

void Corpus::add_caption(CaptionRecord record) {
    if (captions_.contains(record.caption_id)) {
        throw RecordValidationError("duplicate caption id", {record.caption_id});
    }
    if (record.moment.start_segment < 0 || record.moment.end_segment < record.moment.start_segment) {
        throw RecordValidationError("invalid moment bounds", {record.caption_id});
    }
    if (const auto* v = find_video(record.moment.video_id);
        v && record.moment.end_segment >= v->duration_segments) {
        throw RecordValidationError("segment out of range", {record.caption_id});
    }
    auto id = record.caption_id;
    captions_.emplace(std::move(id), std::move(record));
}

const CaptionRecord* Corpus::find(std::string_view caption_id) const {
    auto it = captions_.find(caption_id);
    return it == captions_.end() ? nullptr : &it->second;
}

const CaptionRecord& Corpus::at(std::string_view caption_id) const {
    if (const auto* r = find(caption_id)) return *r;
    throw NotFoundError("unknown caption id '" + std::string(caption_id) + "'");
}

CaptionRecord& Corpus::mutable_at(std::string_view caption_id) {
    auto it = captions_.find(caption_id);
    if (it == captions_.end()) throw NotFoundError("unknown caption id '" + std::string(caption_id) + "'");
    return it->second;
}

const VideoRef* Corpus::find_video(std::string_view video_id) const {
    auto it = videos_.find(video_id);
    return it == videos_.end() ? nullptr : &it->second;
}

std::size_t Corpus::moment_count() const {
    std::set<std::tuple<std::string_view, int, int>> moments;
    for (const auto& [id, r] : captions_) {
        moments.emplace(r.moment.video_id, r.moment.start_segment, r.moment.end_segment);
    }
    return moments.size();
}

void Corpus::record_translation(std::string_view caption_id, std::string raw, std::optional<EditRecord> cleanup) {
    auto& r = mutable_at(caption_id);
    if (r.status != Status::pending) {
        throw ConflictError("caption " + r.caption_id + " is already translated");
    }
    if (raw.empty()) throw ValidationError("caption " + r.caption_id + ": empty translation");
    if (cleanup && (cleanup->before != raw || cleanup->after.empty())) {
        throw ValidationError("caption " + r.caption_id + ": cleanup edit does not start from the raw text");
    }
    r.raw_translation = std::move(raw);
    r.status = Status::translated;
    if (cleanup) {
        r.current_text = cleanup->after;
        cleanup->caption_id = r.caption_id;
        r.history.push_back(std::move(*cleanup));
    }
    notes_.erase(r.caption_id);
}

void Corpus::record_flags(FlagRecord flags) {
    auto& r = mutable_at(flags.caption_id);
    const Status next = (flags.categories.empty() && !flags.review_needed) ? Status::translated : Status::flagged;
    require_transition(r, next);
    r.flags = flags.categories;
    r.status = next;
    auto id = flags.caption_id;
    flags_.insert_or_assign(std::move(id), std::move(flags));
}

void Corpus::append_edit(EditRecord edit) {
    auto& r = mutable_at(edit.caption_id);
    require_transition(r, Status::edited);
    if (edit.after.empty()) throw ValidationError("caption " + r.caption_id + ": edit text is empty");
    if (edit.before != r.latest_text()) {
        throw ConflictError("caption " + r.caption_id + ": edit 'before' does not match the current text");
    }
    if (edit.is_approval()) throw ValidationError("caption " + r.caption_id + ": edit does not change the text");
    r.current_text = edit.after;
    r.status = Status::edited;
    r.history.push_back(std::move(edit));
}

void Corpus::append_approval(std::string_view caption_id, std::string annotator_id, Timestamp ts) {
    auto& r = mutable_at(caption_id);
    require_transition(r, Status::approved);
    if (!r.raw_translation) throw ConflictError("caption " + r.caption_id + ": nothing to approve");
    const std::string text = r.latest_text();
    r.current_text = text;
    r.status = Status::approved;
    r.history.push_back(EditRecord{r.caption_id, text, text, {}, std::move(annotator_id), ts});
}

void Corpus::set_note(std::string_view caption_id, std::string note) {
    mutable_at(caption_id);
    notes_.insert_or_assign(std::string(caption_id), std::move(note));
}

void Corpus::clear_note(std::string_view caption_id) {
    if (auto it = notes_.find(caption_id); it != notes_.end()) notes_.erase(it);
}

void Corpus::replace(CaptionRecord record) {
    auto id = record.caption_id;
    captions_.insert_or_assign(std::move(id), std::move(record));
}

void Corpus::replace_flag_record(FlagRecord flags) {
    auto id = flags.caption_id;
    flags_.insert_or_assign(std::move(id), std::move(flags));
}

bool Corpus::is_flagged(const CaptionRecord& record) const {
    if (!record.flags.empty()) return true;
    auto it = flags_.find(record.caption_id);
    return it != flags_.end() && it->second.review_needed;
}

std::vector<CaptionRecord> query(const Corpus& corpus, const CaptionFilter& filter) {
    std::vector<CaptionRecord> out;
    for (const auto& [id, r] : corpus.captions()) {
        if (filter.split && r.split != *filter.split) continue;
        if (filter.status && r.status != *filter.status) continue;
        if (filter.category && !r.flags.contains(*filter.category)) continue;
        out.push_back(r);
    }
    return out;
}

}  // namespace autoarabic
