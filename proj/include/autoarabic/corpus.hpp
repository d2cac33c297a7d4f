// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoarabic/error_category.hpp"

namespace autoarabic {

using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

/// Wall clock truncated to seconds.
Timestamp system_now();
/// Clock that always returns `t`; used for reproducible offline runs.
Clock fixed_clock(Timestamp t);

std::string format_rfc3339(Timestamp t);
Timestamp parse_rfc3339(std::string_view s);

enum class Split { train, validation, test };
enum class Status { pending, translated, flagged, edited, approved };

std::string_view to_string(Split s) noexcept;
std::string_view to_string(Status s) noexcept;
Split split_from_string(std::string_view s);
Status status_from_string(std::string_view s);

struct VideoRef {
    std::string video_id;
    Split split = Split::train;
    int duration_segments = 6;

    bool operator==(const VideoRef&) const = default;
};

struct Moment {
    std::string video_id;
    int start_segment = 0;
    int end_segment = 0;

    bool operator==(const Moment&) const = default;
};

/// One post-editing decision. An approval is recorded as an edit whose
/// `after` equals `before`.
struct EditRecord {
    std::string caption_id;
    std::string before;
    std::string after;
    CategorySet categories;
    std::string annotator_id;
    Timestamp timestamp{};

    bool is_approval() const noexcept { return before == after; }
    bool operator==(const EditRecord&) const = default;
};

struct CaptionRecord {
    std::string caption_id;
    Moment moment;
    Split split = Split::train;
    std::string source_text;
    std::optional<std::string> raw_translation;
    std::optional<std::string> current_text;
    Status status = Status::pending;
    CategorySet flags;
    std::vector<EditRecord> history;

    /// Latest text: current_text when set, else the raw translation, else "".
    const std::string& latest_text() const noexcept;
    /// True if any history event changed the text.
    bool has_text_edits() const noexcept;

    bool operator==(const CaptionRecord&) const = default;
};

enum class FlagSource { rule, judge };
std::string_view to_string(FlagSource s) noexcept;
FlagSource flag_source_from_string(std::string_view s);

/// Detector output for one caption.
struct FlagRecord {
    std::string caption_id;
    CategorySet categories;
    std::map<ErrorCategory, FlagSource> source_per_category;
    std::optional<std::string> judge_raw_output;
    /// Judge answer could not be parsed; the caption needs a human look
    /// regardless of `categories`.
    bool review_needed = false;
    Timestamp created_at{};

    bool operator==(const FlagRecord&) const = default;
};

/// caption_id = "<video_id>#<start>-<end>#<k>"
std::string make_caption_id(const Moment& m, int ordinal);

bool is_allowed_transition(Status from, Status to) noexcept;

struct CaptionFilter {
    std::optional<Split> split{};
    std::optional<Status> status{};
    std::optional<ErrorCategory> category{};
};

/// In-memory corpus. Mutators enforce the caption lifecycle; a rejected
/// mutation throws ConflictError and leaves the record unchanged.
class Corpus {
public:
    void add_video(VideoRef video);
    void add_caption(CaptionRecord record);

    const CaptionRecord* find(std::string_view caption_id) const;
    const CaptionRecord& at(std::string_view caption_id) const;
    const VideoRef* find_video(std::string_view video_id) const;

    const std::map<std::string, CaptionRecord, std::less<>>& captions() const noexcept { return captions_; }
    const std::map<std::string, VideoRef, std::less<>>& videos() const noexcept { return videos_; }
    const std::map<std::string, FlagRecord, std::less<>>& flag_records() const noexcept { return flags_; }
    const std::map<std::string, std::string, std::less<>>& notes() const noexcept { return notes_; }

    std::size_t size() const noexcept { return captions_.size(); }
    bool empty() const noexcept { return captions_.empty(); }
    std::size_t moment_count() const;

    /// pending -> translated. `cleanup` (optional) is an automatic edit
    /// applied on top of the raw output.
    void record_translation(std::string_view caption_id, std::string raw,
                            std::optional<EditRecord> cleanup = std::nullopt);
    /// Replaces the caption's FlagRecord. Status becomes flagged when the
    /// record has categories or needs review, otherwise stays translated.
    void record_flags(FlagRecord flags);
    /// Text-changing edit; status becomes edited.
    void append_edit(EditRecord edit);
    /// Approval event; status becomes approved.
    void append_approval(std::string_view caption_id, std::string annotator_id, Timestamp ts);

    void set_note(std::string_view caption_id, std::string note);
    void clear_note(std::string_view caption_id);

    /// Overwrites a whole record. Used by journal replay only.
    void replace(CaptionRecord record);
    void replace_flag_record(FlagRecord flags);

    /// Flagged means: has categories, or its FlagRecord asks for review.
    bool is_flagged(const CaptionRecord& record) const;

    bool operator==(const Corpus&) const = default;

private:
    CaptionRecord& mutable_at(std::string_view caption_id);

    std::map<std::string, CaptionRecord, std::less<>> captions_;
    std::map<std::string, VideoRef, std::less<>> videos_;
    std::map<std::string, FlagRecord, std::less<>> flags_;
    std::map<std::string, std::string, std::less<>> notes_;
};

/// Records matching every supplied filter field, caption_id ascending.
std::vector<CaptionRecord> query(const Corpus& corpus, const CaptionFilter& filter = {});

}  // namespace autoarabic
