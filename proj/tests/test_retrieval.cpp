// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include <catch_amalgamated.hpp>

#include <random>

#include "autoarabic/analytics.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/retrieval.hpp"
#include "autoarabic/review.hpp"
#include "oracles.hpp"
#include "rank_fixtures.hpp"
#include "support.hpp"

using namespace autoarabic;
using namespace autoarabic::retrieval;
using namespace autoarabic::testing;
using Catch::Approx;

namespace {

SimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t q, std::size_t c) {
    SimilarityMatrix m;
    for (std::size_t i = 0; i < q; ++i) m.query_ids.push_back("q" + std::to_string(i));
    for (std::size_t j = 0; j < c; ++j) m.candidate_ids.push_back("c" + std::to_string(j));
    m.scores.resize(q * c);
    // Coarse values so ties are common.
    for (auto& s : m.scores) s = static_cast<double>(rng() % 7) / 7.0;
    m.truth.resize(q);
    for (auto& t : m.truth) {
        const std::size_t k = 1 + rng() % std::min<std::size_t>(4, c);
        while (t.size() < k) {
            const std::size_t j = rng() % c;
            if (std::find(t.begin(), t.end(), j) == t.end()) t.push_back(j);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("metrics of an explicit rank list") {
    const std::vector<std::size_t> r = {1, 2, 100};
    CHECK(recall_at_k(r, 1) == Approx(1.0 / 3.0));
    CHECK(recall_at_k(r, 5) == Approx(2.0 / 3.0));
    CHECK(median_rank(r) == 2);
    CHECK(mean_rank(r) == Approx(103.0 / 3.0));
    CHECK(analytics::format_fixed(mean_rank(r), 1) == "34.3");
    CHECK(median_rank({4, 1, 3, 2}) == 2);
}

TEST_CASE("rank of truth counts strictly better candidates") {
    const std::vector<double> row = {0.9, 0.5, 0.5, 0.1};
    CHECK(rank_of_truth(row, {1}) == 2);
    CHECK(rank_of_truth(row, {1}, TieBreak::pessimistic) == 3);
    CHECK(rank_of_truth(row, {1, 2}, TieBreak::pessimistic) == 2);
    CHECK(rank_of_truth(row, {3, 0}) == 1);
    CHECK(rank_of_truth(row, {3}) == 4);
}

TEST_CASE("matrix metrics agree with a sorting oracle") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_matrix(rng, 1 + rng() % 50, 1 + rng() % 50);
        for (auto tie : {TieBreak::optimistic, TieBreak::pessimistic}) {
            const auto got = ranks(m, tie);
            std::vector<std::size_t> want;
            for (std::size_t q = 0; q < m.queries(); ++q) {
                std::vector<double> row(m.row(q), m.row(q) + m.candidates());
                want.push_back(oracle::sorted_rank(row, m.truth[q], tie == TieBreak::pessimistic));
            }
            REQUIRE(got == want);
            for (std::size_t k : {1u, 5u, 10u}) {
                if (k > m.candidates()) continue;
                CHECK(recall_at_k(m, k, tie) == Approx(oracle::recall_at(want, k)));
            }
            CHECK(static_cast<double>(median_rank(m, tie)) == oracle::median_of(want));
            CHECK(mean_rank(m, tie) == Approx(oracle::mean_of(want)));
        }
    }
}

TEST_CASE("identity similarity ranks everything first") {
    SimilarityMatrix m = matrix_with_ranks(std::vector<std::size_t>(8, 1));
    const auto r = evaluate(m, Direction::text_to_video);
    CHECK(r.r1 == 1.0);
    CHECK(r.median_rank == 1);
    CHECK(r.mean_rank == 1.0);
}

TEST_CASE("matrix validation and k bounds") {
    SimilarityMatrix m = matrix_with_ranks({1, 2, 3});
    CHECK_THROWS_AS(recall_at_k(m, 0), ValidationError);
    CHECK_THROWS_AS(recall_at_k(m, 4), ValidationError);
    CHECK(recall_at_k(m, 3) == 1.0);

    SimilarityMatrix bad = m;
    bad.scores[0] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = m;
    bad.truth[1].clear();
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    SimilarityMatrix gt = m;
    CHECK_THROWS_AS(gt.set_ground_truth({{"q0", {"v0"}}, {"q1", {"v1"}}}), ValidationError);
    CHECK_THROWS_AS(gt.set_ground_truth({{"q0", {"v0"}}, {"q1", {"v1"}}, {"q2", {"nope"}}}), ValidationError);
    gt.set_ground_truth({{"q0", {"v0"}}, {"q1", {"v1", "v2"}}, {"q2", {"v2"}}});
    CHECK(gt.truth[1] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("transposition inverts the ground truth") {
    std::mt19937_64 rng(8);
    const auto m = random_matrix(rng, 6, 9);
    const auto t = m.transposed();
    CHECK(t.queries() == 9);
    CHECK(t.candidates() == 6);
    for (std::size_t q = 0; q < 6; ++q) {
        for (std::size_t c = 0; c < 9; ++c) CHECK(t.row(c)[q] == m.row(q)[c]);
    }
    for (std::size_t q = 0; q < 6; ++q) {
        for (auto c : m.truth[q]) {
            CHECK(std::find(t.truth[c].begin(), t.truth[c].end(), q) != t.truth[c].end());
        }
    }
}

TEST_CASE("cosine similarity from embeddings") {
    EmbeddingSet q{{"a", "b"}, 2, {1, 0, 0, 2}};
    EmbeddingSet c{{"x", "y", "z"}, 2, {3, 0, 0, 1, 1, 1}};
    const auto m = similarity_from_embeddings(q, c, {{"a", {"x"}}, {"b", {"y"}}});
    CHECK(m.row(0)[0] == Approx(1.0));
    CHECK(m.row(0)[1] == Approx(0.0));
    CHECK(m.row(1)[2] == Approx(std::sqrt(0.5)));
    CHECK(evaluate(m, Direction::text_to_video).r1 == 1.0);

    EmbeddingSet zero{{"z"}, 2, {0, 0}};
    CHECK_THROWS_AS(similarity_from_embeddings(zero, c, {{"z", {"x"}}}), ValidationError);
    EmbeddingSet wide{{"w"}, 3, {1, 2, 3}};
    CHECK_THROWS_AS(similarity_from_embeddings(wide, c, {{"w", {"x"}}}), ValidationError);
}

TEST_CASE("binary files round-trip") {
    TempDir dir;
    std::mt19937_64 rng(3);
    auto m = random_matrix(rng, 5, 7);
    for (auto& s : m.scores) s = static_cast<float>(s);
    write_similarity(m, dir / "m.sim");
    auto back = read_similarity(dir / "m.sim");
    CHECK(back.query_ids == m.query_ids);
    CHECK(back.candidate_ids == m.candidate_ids);
    CHECK(back.scores == m.scores);

    EmbeddingSet e{{"a", "b"}, 3, {1, 2, 3, 4, 5, 6}};
    write_embeddings(e, dir / "e.emb");
    const auto eb = read_embeddings(dir / "e.emb");
    CHECK(eb.ids == e.ids);
    CHECK(eb.vectors == e.vectors);

    const std::string raw = read_text(dir / "m.sim");
    write_text(dir / "cut.sim", raw.substr(0, raw.size() - 3));
    write_text(dir / "cut.sim.qids", read_text(dir / "m.sim.qids"));
    write_text(dir / "cut.sim.cids", read_text(dir / "m.sim.cids"));
    CHECK_THROWS_AS(read_similarity(dir / "cut.sim"), IntegrityError);
    write_text(dir / "bad.sim", "NOPE" + raw.substr(4));
    write_text(dir / "bad.sim.qids", read_text(dir / "m.sim.qids"));
    write_text(dir / "bad.sim.cids", read_text(dir / "m.sim.cids"));
    CHECK_THROWS_AS(read_similarity(dir / "bad.sim"), ParseError);
    write_text(dir / "m.sim.qids", "only-one\n");
    CHECK_THROWS_AS(read_similarity(dir / "m.sim"), ValidationError);
}

TEST_CASE("ground truth files") {
    const auto gt = parse_ground_truth("q1\tv1\nq1\tv2\n\nq2\tv9\n", "gt.tsv");
    CHECK(gt.at("q1") == std::set<std::string>{"v1", "v2"});
    CHECK_THROWS_AS(parse_ground_truth("q1 v1\n", "gt.tsv"), ParseError);
    const auto m = matrix_with_ranks({1, 1});
    CHECK(format_ground_truth(m) == "q0\tv0\nq1\tv1\n");
}

TEST_CASE("comparison deltas and formatting") {
    CHECK(format_delta(-0.028) == "Δ-0.028");
    CHECK(format_delta(3, 0) == "Δ+3");
    CHECK(format_delta(0.0) == "Δ0.000");

    const auto a = report_from_ranks({1, 1, 3, 20}, 20, Direction::text_to_video);
    const auto b = report_from_ranks({1, 2, 3, 20}, 20, Direction::text_to_video);
    const auto d = compare_reports(a, b);
    CHECK(d.r1 == Approx(-0.25));
    CHECK(d.mean_rank == Approx(0.25));
    const auto v2t = report_from_ranks({1}, 1, Direction::video_to_text);
    CHECK_THROWS_AS(compare_reports(a, v2t), ValidationError);

    RetrievalReport x = a, y = a;
    x.r1 = 172.0 / 1003;
    y.r1 = 143.0 / 1003;
    CHECK(format_delta(compare_reports(x, y).r1) == "Δ-0.029");
    CHECK(format_delta(compare_rounded(x, y, 3).r1) == "Δ-0.028");
    CHECK(comparison_table(x, y, "EN", "AR", 3).find("0.143 (Δ-0.028)") != std::string::npos);
}

TEST_CASE("budget sweep needs all three budgets") {
    std::map<Budget, SimilarityMatrix> mats;
    mats.emplace(Budget::zero, matrix_with_ranks({2, 1, 3}));
    try {
        budget_sweep(mats, Direction::text_to_video);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("few, full") != std::string::npos);
    }
    mats.emplace(Budget::few, matrix_with_ranks({1, 1, 3}));
    mats.emplace(Budget::full, matrix_with_ranks({1, 1, 1}));
    const auto s = budget_sweep(mats, Direction::text_to_video);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[2].second.r1 == 1.0);
    const auto table = to_table(s);
    CHECK(table.find("Raw (zero)") != std::string::npos);
    CHECK(table.find("Fix all (full)") != std::string::npos);
    CHECK(to_csv(s).find("full,1.0000,1.0000,1.0000,1,1.0\n") != std::string::npos);
}

TEST_CASE("profile builder reproduces requested summary numbers") {
    const auto r = ranks_with_profile(1003, 120, 324, 469, 13, 55.9);
    const auto rep = evaluate(matrix_with_ranks(r), Direction::text_to_video);
    CHECK(analytics::format_fixed(rep.r1, 4) == "0.1196");
    CHECK(analytics::format_fixed(rep.r5, 4) == "0.3230");
    CHECK(analytics::format_fixed(rep.r10, 4) == "0.4676");
    CHECK(rep.median_rank == 13);
    CHECK(analytics::format_fixed(rep.mean_rank, 1) == "55.9");
}
