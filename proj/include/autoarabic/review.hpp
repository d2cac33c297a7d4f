// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "autoarabic/corpus.hpp"
#include "autoarabic/corpus_store.hpp"

namespace autoarabic {

/// Post-editing budget: zero = raw output, few = flagged captions only,
/// full = every caption.
enum class Budget { zero, few, full };

std::string_view to_string(Budget b) noexcept;
Budget budget_from_string(std::string_view s);

enum class TaskState { open, in_progress, done, skipped };
std::string_view to_string(TaskState s) noexcept;
TaskState task_state_from_string(std::string_view s);

struct ReviewTask {
    std::string caption_id;
    std::string source_text;
    std::string presented_text;
    CategorySet flags;
    bool review_needed = false;
    std::optional<std::string> suggested_fix;
    std::optional<std::string> assigned_to;
    TaskState state = TaskState::open;
    /// Optimistic-concurrency token: the caption's history length.
    std::size_t version = 0;
};

/// Tasks for `budget`, flagged captions first, then caption_id. Captions
/// that are edited or approved appear as done.
std::vector<ReviewTask> build_queue(const Corpus& corpus, Budget budget);

/// Captions the budget covers; translated ones only.
bool in_budget(const Corpus& corpus, const CaptionRecord& record, Budget budget);

struct MaterializedCaption {
    std::string caption_id;
    std::string text;

    bool operator==(const MaterializedCaption&) const = default;
};

/// Caption text implied by a budget, for every translated caption in
/// caption_id order: raw output under zero, the edited text of flagged and
/// edited captions under few, the latest text under full.
std::vector<MaterializedCaption> materialize(const Corpus& corpus, Budget budget);

/// The corpus with every translated caption's current_text replaced by its
/// materialized text, in corpus file format.
std::string export_materialized(const Corpus& corpus, Budget budget);

/// Number of captions whose materialized text differs from the raw output.
std::size_t edit_application_count(const Corpus& corpus, Budget budget);

struct ApproveResult {
    bool applied = false;
    std::optional<std::string> warning;
};

/// Mutating side of the review stage. Work is scoped to one budget; all
/// writes go through the store's single writer.
class ReviewService {
public:
    ReviewService(CorpusStore& store, Budget budget, Clock clock = system_now);

    Budget budget() const noexcept { return budget_; }
    std::vector<ReviewTask> queue(Budget budget, std::optional<TaskState> state = std::nullopt) const;

    /// Throws NotFoundError for an unknown caption, ValidationError for an
    /// empty text, ConflictError when no task is open or `expected_version`
    /// is stale.
    EditRecord submit_edit(std::string_view caption_id, std::string after, CategorySet categories,
                           std::string annotator_id, std::optional<std::size_t> expected_version = std::nullopt);

    /// Approving an approved caption is a no-op that returns a warning.
    ApproveResult approve(std::string_view caption_id, std::string annotator_id,
                          std::optional<std::size_t> expected_version = std::nullopt);

    /// Optimistic claim; informational only.
    void claim(std::string_view caption_id, std::string annotator_id);
    void skip(std::string_view caption_id);

private:
    void apply_session_state(std::vector<ReviewTask>& tasks) const;
    void require_task(const Corpus& corpus, const CaptionRecord& record, std::optional<std::size_t> version) const;

    CorpusStore& store_;
    Budget budget_;
    Clock clock_;
    mutable std::mutex session_mu_;
    std::map<std::string, std::string, std::less<>> claims_;
    std::set<std::string, std::less<>> skipped_;
};

}  // namespace autoarabic
