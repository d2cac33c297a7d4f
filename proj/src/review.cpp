// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/review.hpp"

#include <algorithm>

#include "autoarabic/arabic_text.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic {

std::string_view to_string(Budget b) noexcept {
    switch (b) {
        case Budget::zero: return "zero";
        case Budget::few: return "few";
        case Budget::full: return "full";
    }
    return "";
}

Budget budget_from_string(std::string_view s) {
    for (auto b : {Budget::zero, Budget::few, Budget::full}) {
        if (to_string(b) == s) return b;
    }
    throw ValidationError("unknown budget '" + std::string(s) + "' (expected zero, few or full)");
}

std::string_view to_string(TaskState s) noexcept {
    switch (s) {
        case TaskState::open: return "open";
        case TaskState::in_progress: return "in_progress";
        case TaskState::done: return "done";
        case TaskState::skipped: return "skipped";
    }
    return "";
}

TaskState task_state_from_string(std::string_view s) {
    for (auto t : {TaskState::open, TaskState::in_progress, TaskState::done, TaskState::skipped}) {
        if (to_string(t) == s) return t;
    }
    throw ValidationError("unknown task state '" + std::string(s) + "'");
}

bool in_budget(const Corpus& corpus, const CaptionRecord& record, Budget budget) {
    if (record.status == Status::pending) return false;
    switch (budget) {
        case Budget::zero: return false;
        case Budget::few: return corpus.is_flagged(record);
        case Budget::full: return true;
    }
    return false;
}

namespace {

bool needs_review(const Corpus& corpus, const CaptionRecord& r) {
    auto it = corpus.flag_records().find(r.caption_id);
    return it != corpus.flag_records().end() && it->second.review_needed;
}

ReviewTask make_task(const Corpus& corpus, const CaptionRecord& r) {
    ReviewTask t;
    t.caption_id = r.caption_id;
    t.source_text = r.source_text;
    t.presented_text = r.latest_text();
    t.flags = r.flags;
    t.review_needed = needs_review(corpus, r);
    t.version = r.history.size();
    t.state = (r.status == Status::edited || r.status == Status::approved) ? TaskState::done : TaskState::open;
    if (r.flags == CategorySet{ErrorCategory::diacritics} && !t.review_needed) {
        t.suggested_fix = text::strip_diacritics(t.presented_text);
    }
    return t;
}

}  // namespace

std::vector<ReviewTask> build_queue(const Corpus& corpus, Budget budget) {
    std::vector<ReviewTask> flagged;
    std::vector<ReviewTask> rest;
    for (const auto& [id, r] : corpus.captions()) {
        if (!in_budget(corpus, r, budget)) continue;
        (corpus.is_flagged(r) ? flagged : rest).push_back(make_task(corpus, r));
    }
    flagged.insert(flagged.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    return flagged;
}

std::vector<MaterializedCaption> materialize(const Corpus& corpus, Budget budget) {
    std::vector<MaterializedCaption> out;
    for (const auto& [id, r] : corpus.captions()) {
        if (!r.raw_translation) continue;
        const std::string* text = &*r.raw_translation;
        if (budget == Budget::full || (budget == Budget::few && corpus.is_flagged(r) && r.has_text_edits())) {
            text = &r.latest_text();
        }
        out.push_back({id, *text});
    }
    return out;
}

std::string export_materialized(const Corpus& corpus, Budget budget) {
    Corpus projected = corpus;
    for (auto& m : materialize(corpus, budget)) {
        CaptionRecord r = corpus.at(m.caption_id);
        r.current_text = std::move(m.text);
        projected.replace(std::move(r));
    }
    return serialize_corpus(projected);
}

std::size_t edit_application_count(const Corpus& corpus, Budget budget) {
    std::size_t n = 0;
    for (const auto& m : materialize(corpus, budget)) {
        if (m.text != *corpus.at(m.caption_id).raw_translation) ++n;
    }
    return n;
}

ReviewService::ReviewService(CorpusStore& store, Budget budget, Clock clock)
    : store_(store), budget_(budget), clock_(std::move(clock)) {}

void ReviewService::apply_session_state(std::vector<ReviewTask>& tasks) const {
    std::lock_guard lock(session_mu_);
    for (auto& t : tasks) {
        if (t.state == TaskState::done) continue;
        if (skipped_.contains(t.caption_id)) {
            t.state = TaskState::skipped;
        } else if (auto it = claims_.find(t.caption_id); it != claims_.end()) {
            t.state = TaskState::in_progress;
            t.assigned_to = it->second;
        }
    }
}

std::vector<ReviewTask> ReviewService::queue(Budget budget, std::optional<TaskState> state) const {
    auto tasks = store_.read([&](const Corpus& c) { return build_queue(c, budget); });
    apply_session_state(tasks);
    if (state) {
        std::erase_if(tasks, [&](const ReviewTask& t) { return t.state != *state; });
    }
    return tasks;
}

void ReviewService::require_task(const Corpus& corpus, const CaptionRecord& r,
                                 std::optional<std::size_t> version) const {
    if (!in_budget(corpus, r, budget_)) {
        throw ConflictError("caption " + r.caption_id + " has no review task under budget " +
                            std::string(to_string(budget_)));
    }
    if (r.status == Status::approved) throw ConflictError("caption " + r.caption_id + " is already approved");
    if (version && *version != r.history.size()) {
        throw ConflictError("caption " + r.caption_id + ": stale version " + std::to_string(*version) +
                            " (current " + std::to_string(r.history.size()) + ")");
    }
}

EditRecord ReviewService::submit_edit(std::string_view caption_id, std::string after, CategorySet categories,
                                      std::string annotator_id, std::optional<std::size_t> expected_version) {
    if (text::normalize_for_compare(after).empty()) throw ValidationError("edited text is empty");
    if (annotator_id.empty()) throw ValidationError("annotator_id is required");
    EditRecord edit;
    store_.update(caption_id, [&](Corpus& c) {
        const CaptionRecord& r = c.at(caption_id);
        require_task(c, r, expected_version);
        edit = EditRecord{r.caption_id, r.latest_text(), after, categories, annotator_id, clock_()};
        c.append_edit(edit);
    });
    std::lock_guard lock(session_mu_);
    claims_.erase(edit.caption_id);
    skipped_.erase(edit.caption_id);
    return edit;
}

ApproveResult ReviewService::approve(std::string_view caption_id, std::string annotator_id,
                                     std::optional<std::size_t> expected_version) {
    if (annotator_id.empty()) throw ValidationError("annotator_id is required");
    const bool already = store_.read([&](const Corpus& c) { return c.at(caption_id).status == Status::approved; });
    if (already) {
        std::string warning = "caption " + std::string(caption_id) + " is already approved";
        log::warn(warning);
        return {false, std::move(warning)};
    }
    store_.update(caption_id, [&](Corpus& c) {
        const CaptionRecord& r = c.at(caption_id);
        require_task(c, r, expected_version);
        c.append_approval(caption_id, annotator_id, clock_());
    });
    std::lock_guard lock(session_mu_);
    claims_.erase(std::string(caption_id));
    skipped_.erase(std::string(caption_id));
    return {true, std::nullopt};
}

void ReviewService::claim(std::string_view caption_id, std::string annotator_id) {
    store_.read([&](const Corpus& c) { return c.at(caption_id).status; });
    std::lock_guard lock(session_mu_);
    auto [it, inserted] = claims_.try_emplace(std::string(caption_id), annotator_id);
    if (!inserted && it->second != annotator_id) {
        throw ConflictError("caption " + std::string(caption_id) + " is claimed by " + it->second);
    }
}

void ReviewService::skip(std::string_view caption_id) {
    store_.read([&](const Corpus& c) { return c.at(caption_id).status; });
    std::lock_guard lock(session_mu_);
    skipped_.insert(std::string(caption_id));
    claims_.erase(std::string(caption_id));
}

}  // namespace autoarabic
