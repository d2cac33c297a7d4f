// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "autoarabic/review.hpp"

namespace autoarabic::retrieval {

struct EmbeddingSet {
    std::vector<std::string> ids;
    std::size_t dim = 0;
    /// Row-major ids.size() x dim.
    std::vector<float> vectors;

    std::size_t size() const noexcept { return ids.size(); }
    const float* row(std::size_t i) const { return vectors.data() + i * dim; }
    /// Throws ValidationError on duplicate ids, shape mismatch or
    /// non-finite values.
    void validate() const;
};

/// query id -> ground-truth candidate ids.
using GroundTruth = std::map<std::string, std::set<std::string>>;

struct SimilarityMatrix {
    std::vector<std::string> query_ids;
    std::vector<std::string> candidate_ids;
    /// Row-major |q| x |c|.
    std::vector<double> scores;
    /// Candidate indices per query, same order as query_ids.
    std::vector<std::vector<std::size_t>> truth;

    std::size_t queries() const noexcept { return query_ids.size(); }
    std::size_t candidates() const noexcept { return candidate_ids.size(); }
    const double* row(std::size_t q) const { return scores.data() + q * candidates(); }

    /// Resolves `gt` against the id lists. Throws ValidationError when a
    /// query lacks ground truth or names an unknown candidate.
    void set_ground_truth(const GroundTruth& gt);
    /// Invariants: shape, finite scores, non-empty in-range truth per query.
    void validate() const;
    /// Roles swapped: scores transposed, truth inverted.
    SimilarityMatrix transposed() const;
};

enum class Direction { text_to_video, video_to_text };
std::string_view to_string(Direction d) noexcept;
Direction direction_from_string(std::string_view s);

enum class TieBreak { optimistic, pessimistic };
std::string_view to_string(TieBreak t) noexcept;
TieBreak tie_break_from_string(std::string_view s);

/// Cosine similarity of every query against every candidate. Throws
/// ValidationError on a dim mismatch or a zero vector.
SimilarityMatrix similarity_from_embeddings(const EmbeddingSet& queries, const EmbeddingSet& candidates,
                                            const GroundTruth& ground_truth);

/// 1 + candidates scoring strictly above the best ground-truth score.
/// Pessimistic mode also counts non-truth candidates tying with it.
std::size_t rank_of_truth(const double* row, std::size_t n, const std::vector<std::size_t>& truth,
                          TieBreak tie = TieBreak::optimistic);
std::size_t rank_of_truth(const std::vector<double>& row, const std::vector<std::size_t>& truth,
                          TieBreak tie = TieBreak::optimistic);

std::vector<std::size_t> ranks(const SimilarityMatrix& m, TieBreak tie = TieBreak::optimistic);

/// Throws ValidationError when k < 1 or k > |candidates|.
double recall_at_k(const SimilarityMatrix& m, std::size_t k, TieBreak tie = TieBreak::optimistic);
std::size_t median_rank(const SimilarityMatrix& m, TieBreak tie = TieBreak::optimistic);
double mean_rank(const SimilarityMatrix& m, TieBreak tie = TieBreak::optimistic);

/// Rank-list forms; recall_at_k treats k beyond every rank normally.
double recall_at_k(const std::vector<std::size_t>& ranks, std::size_t k);
/// Lower median.
std::size_t median_rank(std::vector<std::size_t> ranks);
double mean_rank(const std::vector<std::size_t>& ranks);

struct RetrievalReport {
    Direction direction = Direction::text_to_video;
    double r1 = 0.0;
    double r5 = 0.0;
    double r10 = 0.0;
    std::size_t median_rank = 0;
    double mean_rank = 0.0;
    std::vector<std::size_t> ranks;
};

RetrievalReport evaluate(const SimilarityMatrix& m, Direction direction, TieBreak tie = TieBreak::optimistic);
/// From an explicit rank list; `candidates` bounds the ranks.
RetrievalReport report_from_ranks(std::vector<std::size_t> ranks, std::size_t candidates, Direction direction);

struct ReportDelta {
    Direction direction = Direction::text_to_video;
    double r1 = 0.0;
    double r5 = 0.0;
    double r10 = 0.0;
    double median_rank = 0.0;
    double mean_rank = 0.0;
};

/// Signed differences b - a. Throws ValidationError on direction mismatch.
ReportDelta compare_reports(const RetrievalReport& a, const RetrievalReport& b);
/// Differences of the values as displayed: recalls rounded to
/// `recall_digits`, mean rank to one decimal.
ReportDelta compare_rounded(const RetrievalReport& a, const RetrievalReport& b, int recall_digits = 3);
/// `Δ-0.028` style; zero prints as `Δ0.000`.
std::string format_delta(double value, int digits = 3);

struct BudgetSweep {
    Direction direction = Direction::text_to_video;
    std::vector<std::pair<Budget, RetrievalReport>> rows;
};

/// One report per budget in order zero, few, full. Throws ValidationError
/// naming any missing budget.
BudgetSweep budget_sweep(const std::map<Budget, SimilarityMatrix>& matrices, Direction direction,
                         TieBreak tie = TieBreak::optimistic);

std::string to_csv(const RetrievalReport& r);
std::string to_table(const RetrievalReport& r, std::string_view label = "");
std::string to_csv(const ReportDelta& d);
/// Two rows, the second annotated with its deltas against the first.
/// Recalls print with `digits` decimals and deltas follow the printed values.
std::string comparison_table(const RetrievalReport& a, const RetrievalReport& b, std::string_view label_a,
                             std::string_view label_b, int digits = 4);
std::string to_table(const BudgetSweep& s);
std::string to_csv(const BudgetSweep& s);

// --- file formats ----------------------------------------------------------------

/// `EMB1`, u32 rows, u32 dim, float32 row-major, little-endian; ids from
/// the sidecar (`<path>.ids` unless given), one per line.
EmbeddingSet read_embeddings(const std::filesystem::path& path,
                             const std::optional<std::filesystem::path>& ids_path = std::nullopt);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& ids_path = std::nullopt);

/// `SIM1`, u32 |q|, u32 |c|, float32 matrix. Ids come from
/// `<path>.qids` and `<path>.cids` unless given.
SimilarityMatrix read_similarity(const std::filesystem::path& path,
                                 const std::optional<std::filesystem::path>& query_ids_path = std::nullopt,
                                 const std::optional<std::filesystem::path>& candidate_ids_path = std::nullopt);
void write_similarity(const SimilarityMatrix& m, const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& query_ids_path = std::nullopt,
                      const std::optional<std::filesystem::path>& candidate_ids_path = std::nullopt);

std::filesystem::path default_ids_path(const std::filesystem::path& path, std::string_view suffix);

/// `query_id<TAB>candidate_id` lines, repeatable per query.
GroundTruth parse_ground_truth(std::string_view data, const std::string& source_name);
GroundTruth read_ground_truth(const std::filesystem::path& path);
std::string format_ground_truth(const SimilarityMatrix& m);

}  // namespace autoarabic::retrieval
