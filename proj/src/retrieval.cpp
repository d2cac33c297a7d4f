// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "autoarabic/analytics.hpp"
#include "autoarabic/errors.hpp"

namespace autoarabic::retrieval {

using analytics::format_fixed;

void EmbeddingSet::validate() const {
    if (dim == 0) throw ValidationError("embedding dim must be positive");
    if (vectors.size() != ids.size() * dim) {
        throw ValidationError("embedding shape mismatch: " + std::to_string(ids.size()) + " ids x " +
                              std::to_string(dim) + " dims but " + std::to_string(vectors.size()) + " values");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) throw ValidationError("duplicate embedding id '" + id + "'");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (!std::isfinite(vectors[i])) throw ValidationError("non-finite value in embedding '" + ids[i / dim] + "'");
    }
}

void SimilarityMatrix::set_ground_truth(const GroundTruth& gt) {
    std::unordered_map<std::string_view, std::size_t> cand_index;
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
        if (!cand_index.emplace(candidate_ids[i], i).second) {
            throw ValidationError("duplicate candidate id '" + candidate_ids[i] + "'");
        }
    }
    std::unordered_set<std::string_view> query_set(query_ids.begin(), query_ids.end());
    for (const auto& [q, cs] : gt) {
        if (!query_set.contains(q)) throw ValidationError("ground truth names unknown query '" + q + "'");
    }
    truth.assign(query_ids.size(), {});
    for (std::size_t q = 0; q < query_ids.size(); ++q) {
        auto it = gt.find(query_ids[q]);
        if (it == gt.end() || it->second.empty()) {
            throw ValidationError("query '" + query_ids[q] + "' has no ground truth");
        }
        for (const auto& c : it->second) {
            auto ci = cand_index.find(c);
            if (ci == cand_index.end()) {
                throw ValidationError("ground truth for '" + query_ids[q] + "' names unknown candidate '" + c + "'");
            }
            truth[q].push_back(ci->second);
        }
        std::sort(truth[q].begin(), truth[q].end());
    }
}

void SimilarityMatrix::validate() const {
    if (scores.size() != queries() * candidates()) throw ValidationError("similarity matrix shape mismatch");
    if (candidates() == 0) throw ValidationError("similarity matrix has no candidates");
    if (truth.size() != queries()) throw ValidationError("ground truth does not cover every query");
    for (std::size_t q = 0; q < queries(); ++q) {
        if (truth[q].empty()) throw ValidationError("query '" + query_ids[q] + "' has no ground truth");
        for (auto c : truth[q]) {
            if (c >= candidates()) throw ValidationError("ground-truth index out of range");
        }
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw ValidationError("non-finite similarity score");
    }
}

SimilarityMatrix SimilarityMatrix::transposed() const {
    SimilarityMatrix t;
    t.query_ids = candidate_ids;
    t.candidate_ids = query_ids;
    t.scores.resize(scores.size());
    const std::size_t nq = queries(), nc = candidates();
    for (std::size_t q = 0; q < nq; ++q) {
        for (std::size_t c = 0; c < nc; ++c) t.scores[c * nq + q] = scores[q * nc + c];
    }
    t.truth.assign(nc, {});
    for (std::size_t q = 0; q < truth.size(); ++q) {
        for (auto c : truth[q]) t.truth[c].push_back(q);
    }
    return t;
}

std::string_view to_string(Direction d) noexcept {
    return d == Direction::text_to_video ? "text_to_video" : "video_to_text";
}

Direction direction_from_string(std::string_view s) {
    if (s == "text_to_video" || s == "t2v") return Direction::text_to_video;
    if (s == "video_to_text" || s == "v2t") return Direction::video_to_text;
    throw ValidationError("unknown direction '" + std::string(s) + "' (expected text_to_video or video_to_text)");
}

std::string_view to_string(TieBreak t) noexcept { return t == TieBreak::optimistic ? "optimistic" : "pessimistic"; }

TieBreak tie_break_from_string(std::string_view s) {
    if (s == "optimistic") return TieBreak::optimistic;
    if (s == "pessimistic") return TieBreak::pessimistic;
    throw ValidationError("unknown tie-break '" + std::string(s) + "' (expected optimistic or pessimistic)");
}

SimilarityMatrix similarity_from_embeddings(const EmbeddingSet& queries, const EmbeddingSet& candidates,
                                            const GroundTruth& ground_truth) {
    queries.validate();
    candidates.validate();
    if (queries.dim != candidates.dim) {
        throw ValidationError("embedding dim mismatch: queries " + std::to_string(queries.dim) + ", candidates " +
                              std::to_string(candidates.dim));
    }
    const std::size_t dim = queries.dim;
    auto norms = [dim](const EmbeddingSet& set) {
        std::vector<double> out(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            double sum = 0.0;
            for (std::size_t k = 0; k < dim; ++k) sum += static_cast<double>(set.row(i)[k]) * set.row(i)[k];
            if (sum == 0.0) throw ValidationError("zero vector for embedding '" + set.ids[i] + "'");
            out[i] = std::sqrt(sum);
        }
        return out;
    };
    const auto qn = norms(queries);
    const auto cn = norms(candidates);

    SimilarityMatrix m;
    m.query_ids = queries.ids;
    m.candidate_ids = candidates.ids;
    m.scores.resize(queries.size() * candidates.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double dot = 0.0;
            for (std::size_t k = 0; k < dim; ++k) dot += static_cast<double>(queries.row(q)[k]) * candidates.row(c)[k];
            m.scores[q * candidates.size() + c] = dot / (qn[q] * cn[c]);
        }
    }
    m.set_ground_truth(ground_truth);
    return m;
}

std::size_t rank_of_truth(const double* row, std::size_t n, const std::vector<std::size_t>& truth, TieBreak tie) {
    if (truth.empty()) throw ValidationError("rank_of_truth: empty ground truth");
    double best = -std::numeric_limits<double>::infinity();
    for (auto t : truth) {
        if (t >= n) throw ValidationError("rank_of_truth: ground-truth index out of range");
        best = std::max(best, row[t]);
    }
    std::size_t rank = 1;
    for (std::size_t c = 0; c < n; ++c) {
        if (row[c] > best) {
            ++rank;
        } else if (tie == TieBreak::pessimistic && row[c] == best &&
                   !std::binary_search(truth.begin(), truth.end(), c)) {
            ++rank;
        }
    }
    return rank;
}

std::size_t rank_of_truth(const std::vector<double>& row, const std::vector<std::size_t>& truth, TieBreak tie) {
    auto sorted = truth;
    std::sort(sorted.begin(), sorted.end());
    return rank_of_truth(row.data(), row.size(), sorted, tie);
}

std::vector<std::size_t> ranks(const SimilarityMatrix& m, TieBreak tie) {
    m.validate();
    std::vector<std::size_t> out(m.queries());
    for (std::size_t q = 0; q < m.queries(); ++q) {
        auto truth = m.truth[q];
        std::sort(truth.begin(), truth.end());
        out[q] = rank_of_truth(m.row(q), m.candidates(), truth, tie);
    }
    return out;
}

namespace {

void check_k(std::size_t k, std::size_t candidates) {
    if (k < 1 || k > candidates) {
        throw ValidationError("recall@k needs 1 <= k <= " + std::to_string(candidates) + ", got " + std::to_string(k));
    }
}

}  // namespace

double recall_at_k(const std::vector<std::size_t>& r, std::size_t k) {
    if (r.empty()) return 0.0;
    const auto hits = std::count_if(r.begin(), r.end(), [k](std::size_t x) { return x <= k; });
    return static_cast<double>(hits) / static_cast<double>(r.size());
}

std::size_t median_rank(std::vector<std::size_t> r) {
    if (r.empty()) throw ValidationError("median rank of an empty rank list");
    const auto mid = r.begin() + static_cast<std::ptrdiff_t>((r.size() - 1) / 2);
    std::nth_element(r.begin(), mid, r.end());
    return *mid;
}

double mean_rank(const std::vector<std::size_t>& r) {
    if (r.empty()) throw ValidationError("mean rank of an empty rank list");
    const double sum = std::accumulate(r.begin(), r.end(), 0.0, [](double a, std::size_t x) { return a + x; });
    return sum / static_cast<double>(r.size());
}

double recall_at_k(const SimilarityMatrix& m, std::size_t k, TieBreak tie) {
    check_k(k, m.candidates());
    return recall_at_k(ranks(m, tie), k);
}

std::size_t median_rank(const SimilarityMatrix& m, TieBreak tie) { return median_rank(ranks(m, tie)); }
double mean_rank(const SimilarityMatrix& m, TieBreak tie) { return mean_rank(ranks(m, tie)); }

RetrievalReport report_from_ranks(std::vector<std::size_t> r, std::size_t candidates, Direction direction) {
    if (r.empty()) throw ValidationError("retrieval report needs at least one query");
    for (auto x : r) {
        if (x < 1 || x > candidates) throw ValidationError("rank " + std::to_string(x) + " outside 1.." + std::to_string(candidates));
    }
    RetrievalReport rep;
    rep.direction = direction;
    rep.r1 = recall_at_k(r, 1);
    rep.r5 = recall_at_k(r, 5);
    rep.r10 = recall_at_k(r, 10);
    rep.median_rank = median_rank(r);
    rep.mean_rank = mean_rank(r);
    rep.ranks = std::move(r);
    return rep;
}

RetrievalReport evaluate(const SimilarityMatrix& m, Direction direction, TieBreak tie) {
    return report_from_ranks(ranks(m, tie), m.candidates(), direction);
}

ReportDelta compare_reports(const RetrievalReport& a, const RetrievalReport& b) {
    if (a.direction != b.direction) {
        throw ValidationError("cannot compare " + std::string(to_string(a.direction)) + " with " +
                              std::string(to_string(b.direction)));
    }
    ReportDelta d;
    d.direction = a.direction;
    d.r1 = b.r1 - a.r1;
    d.r5 = b.r5 - a.r5;
    d.r10 = b.r10 - a.r10;
    d.median_rank = static_cast<double>(b.median_rank) - static_cast<double>(a.median_rank);
    d.mean_rank = b.mean_rank - a.mean_rank;
    return d;
}

ReportDelta compare_rounded(const RetrievalReport& a, const RetrievalReport& b, int recall_digits) {
    const ReportDelta raw = compare_reports(a, b);
    auto diff = [](double x, double y, int digits) {
        return analytics::round_to(analytics::round_to(y, digits) - analytics::round_to(x, digits), digits);
    };
    ReportDelta d = raw;
    d.r1 = diff(a.r1, b.r1, recall_digits);
    d.r5 = diff(a.r5, b.r5, recall_digits);
    d.r10 = diff(a.r10, b.r10, recall_digits);
    d.mean_rank = diff(a.mean_rank, b.mean_rank, 1);
    return d;
}

std::string format_delta(double value, int digits) {
    const double r = analytics::round_to(value, digits);
    std::string body = format_fixed(std::abs(r), digits);
    if (r > 0) return "Δ+" + body;
    if (r < 0) return "Δ-" + body;
    return "Δ" + body;
}

BudgetSweep budget_sweep(const std::map<Budget, SimilarityMatrix>& matrices, Direction direction, TieBreak tie) {
    std::vector<std::string> missing;
    for (auto b : {Budget::zero, Budget::few, Budget::full}) {
        if (!matrices.contains(b)) missing.emplace_back(to_string(b));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ValidationError("budget sweep missing budget(s): " + list);
    }
    BudgetSweep s;
    s.direction = direction;
    for (auto b : {Budget::zero, Budget::few, Budget::full}) s.rows.emplace_back(b, evaluate(matrices.at(b), direction, tie));
    return s;
}

std::string to_csv(const RetrievalReport& r) {
    std::string out = "name,value\n";
    const std::string p = std::string(to_string(r.direction)) + ".";
    out += p + "r1," + format_fixed(r.r1, 4) + "\n";
    out += p + "r5," + format_fixed(r.r5, 4) + "\n";
    out += p + "r10," + format_fixed(r.r10, 4) + "\n";
    out += p + "median_rank," + std::to_string(r.median_rank) + "\n";
    out += p + "mean_rank," + format_fixed(r.mean_rank, 1) + "\n";
    out += p + "queries," + std::to_string(r.ranks.size()) + "\n";
    return out;
}

namespace {

std::string table_header(std::string_view first) {
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %8s %8s %8s %6s %7s\n", std::string(first).c_str(), "R@1", "R@5", "R@10",
                  "MedR", "MeanR");
    return line;
}

std::string table_row(std::string_view label, const RetrievalReport& r) {
    char line[160];
    std::snprintf(line, sizeof line, "%-20s %8s %8s %8s %6s %7s\n", std::string(label).c_str(),
                  format_fixed(r.r1, 4).c_str(), format_fixed(r.r5, 4).c_str(), format_fixed(r.r10, 4).c_str(),
                  format_fixed(static_cast<double>(r.median_rank), 1).c_str(), format_fixed(r.mean_rank, 1).c_str());
    return line;
}

std::string_view budget_label(Budget b) {
    switch (b) {
        case Budget::zero: return "Raw (zero)";
        case Budget::few: return "Flagged-only (few)";
        case Budget::full: return "Fix all (full)";
    }
    return "";
}

}  // namespace

std::string to_table(const RetrievalReport& r, std::string_view label) {
    return std::string(to_string(r.direction)) + "\n" + table_header("") +
           table_row(label.empty() ? std::string_view("all") : label, r);
}

std::string to_csv(const ReportDelta& d) {
    std::string out = "name,value\n";
    const std::string p = std::string(to_string(d.direction)) + ".delta_";
    out += p + "r1," + format_fixed(d.r1, 4) + "\n";
    out += p + "r5," + format_fixed(d.r5, 4) + "\n";
    out += p + "r10," + format_fixed(d.r10, 4) + "\n";
    out += p + "median_rank," + format_fixed(d.median_rank, 0) + "\n";
    out += p + "mean_rank," + format_fixed(d.mean_rank, 1) + "\n";
    return out;
}

std::string comparison_table(const RetrievalReport& a, const RetrievalReport& b, std::string_view label_a,
                             std::string_view label_b, int digits) {
    const ReportDelta d = compare_rounded(a, b, digits);
    char line[256];
    std::string out = std::string(to_string(a.direction)) + "\n" + table_header("");
    std::snprintf(line, sizeof line, "%-20s %18s %18s %18s %12s %14s\n", std::string(label_a).c_str(),
                  format_fixed(a.r1, digits).c_str(), format_fixed(a.r5, digits).c_str(),
                  format_fixed(a.r10, digits).c_str(), (std::to_string(a.median_rank) + ".0").c_str(),
                  format_fixed(a.mean_rank, 1).c_str());
    out += line;
    auto cell = [](const std::string& value, const std::string& delta) { return value + " (" + delta + ")"; };
    std::snprintf(line, sizeof line, "%-20s %18s %18s %18s %12s %14s\n", std::string(label_b).c_str(),
                  cell(format_fixed(b.r1, digits), format_delta(d.r1, digits)).c_str(),
                  cell(format_fixed(b.r5, digits), format_delta(d.r5, digits)).c_str(),
                  cell(format_fixed(b.r10, digits), format_delta(d.r10, digits)).c_str(),
                  cell(std::to_string(b.median_rank) + ".0", format_delta(d.median_rank, 0)).c_str(),
                  cell(format_fixed(b.mean_rank, 1), format_delta(d.mean_rank, 1)).c_str());
    return out + line;
}

std::string to_table(const BudgetSweep& s) {
    std::string out = std::string(to_string(s.direction)) + "\n" + table_header("Post-Editing");
    for (const auto& [b, r] : s.rows) out += table_row(budget_label(b), r);
    return out;
}

std::string to_csv(const BudgetSweep& s) {
    std::string out = "budget,r1,r5,r10,median_rank,mean_rank\n";
    for (const auto& [b, r] : s.rows) {
        out += std::string(to_string(b)) + "," + format_fixed(r.r1, 4) + "," + format_fixed(r.r5, 4) + "," +
               format_fixed(r.r10, 4) + "," + std::to_string(r.median_rank) + "," + format_fixed(r.mean_rank, 1) + "\n";
    }
    return out;
}

}  // namespace autoarabic::retrieval
