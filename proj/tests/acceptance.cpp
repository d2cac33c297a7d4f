// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional data-dependent references run when their inputs are
// named in the environment:
//   AUTOARABIC_REFERENCE_CORPUS  full translated and flagged corpus file
//   AUTOARABIC_REFERENCE_GOLD    gold detector labels for that corpus

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "autoarabic/analytics.hpp"
#include "autoarabic/arabic_text.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/detect.hpp"
#include "autoarabic/didemo.hpp"
#include "autoarabic/retrieval.hpp"
#include "autoarabic/review.hpp"
#include "autoarabic/review_server.hpp"
#include "autoarabic/translate.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "random_text.hpp"
#include "rank_fixtures.hpp"
#include "support.hpp"

using namespace autoarabic;
using namespace autoarabic::testing;
using analytics::format_fixed;
using nlohmann::json;

namespace {

/// Collects failed expectations for one criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        failed_ = failed_ || !ok;
    }
    template <typename A, typename B>
    void equal(const A& got, const B& want, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want;
        expect(got == want, os.str());
    }
    void note(std::string n) { notes_.push_back(std::move(n)); }

    bool ok() const { return !failed_; }
    std::string summary() const {
        std::string s = std::to_string(count_) + " checks";
        for (const auto& n : notes_) s += "; " + n;
        for (const auto& f : failures_) s += "\n      " + f;
        return s;
    }

private:
    std::size_t count_ = 0;
    bool failed_ = false;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

// --- retrieval metrics against a sorting oracle --------------------------------

void metric_oracle(Checks& c) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t q = 1 + rng() % 50, n = 1 + rng() % 50;
        const bool ties = trial % 2 == 0;
        retrieval::SimilarityMatrix m;
        for (std::size_t i = 0; i < q; ++i) m.query_ids.push_back("q" + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) m.candidate_ids.push_back("c" + std::to_string(j));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        m.scores.resize(q * n);
        for (auto& s : m.scores) s = ties ? static_cast<double>(rng() % 5) / 4.0 : u(rng);
        m.truth.resize(q);
        for (auto& t : m.truth) {
            const std::size_t k = 1 + rng() % std::min<std::size_t>(4, n);
            while (t.size() < k) {
                const std::size_t j = rng() % n;
                if (std::find(t.begin(), t.end(), j) == t.end()) t.push_back(j);
            }
        }
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < q; ++i) {
            want.push_back(oracle::sorted_rank(std::vector<double>(m.row(i), m.row(i) + n), m.truth[i], false));
        }
        const auto tag = "matrix " + std::to_string(trial);
        c.expect(retrieval::ranks(m) == want, tag + ": ranks");
        for (std::size_t k : {1u, 5u, 10u}) {
            if (k > n) continue;
            c.expect(retrieval::recall_at_k(m, k) == oracle::recall_at(want, k), tag + ": R@" + std::to_string(k));
        }
        c.expect(static_cast<double>(retrieval::median_rank(m)) == oracle::median_of(want), tag + ": MedR");
        c.expect(std::abs(retrieval::mean_rank(m) - oracle::mean_of(want)) <= 1e-9, tag + ": MeanR");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 10.0, "runtime under 10 s");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s", secs);
    c.note(buf);
}

// --- published retrieval numbers replayed through the metric layer ----------------

struct Row {
    std::size_t h1, h5, h10, median;
    double mean;
    const char *r1, *r5, *r10, *medr, *meanr;
};

retrieval::RetrievalReport replay(const Row& row) {
    return retrieval::evaluate(matrix_with_ranks(ranks_with_profile(1003, row.h1, row.h5, row.h10, row.median, row.mean)),
                               retrieval::Direction::text_to_video);
}

void published_replay(Checks& c) {
    const Row zero{120, 324, 469, 13, 55.9, "0.1196", "0.3230", "0.4676", "13.0", "55.9"};
    const Row few{132, 313, 457, 12, 55.3, "0.1316", "0.3121", "0.4556", "12.0", "55.3"};
    const Row full{143, 359, 490, 11, 50.6, "0.1426", "0.3579", "0.4885", "11.0", "50.6"};

    std::map<Budget, retrieval::SimilarityMatrix> mats;
    const std::pair<Budget, Row> rows[] = {{Budget::zero, zero}, {Budget::few, few}, {Budget::full, full}};
    for (const auto& [b, row] : rows) {
        mats.emplace(b, matrix_with_ranks(ranks_with_profile(1003, row.h1, row.h5, row.h10, row.median, row.mean)));
    }
    const auto sweep = retrieval::budget_sweep(mats, retrieval::Direction::text_to_video);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& [b, r] = sweep.rows[i];
        const Row& want = rows[i].second;
        const std::string tag(to_string(b));
        c.equal(format_fixed(r.r1, 4), std::string(want.r1), tag + " R@1");
        c.equal(format_fixed(r.r5, 4), std::string(want.r5), tag + " R@5");
        c.equal(format_fixed(r.r10, 4), std::string(want.r10), tag + " R@10");
        c.equal(format_fixed(static_cast<double>(r.median_rank), 1), std::string(want.medr), tag + " MedR");
        c.equal(format_fixed(r.mean_rank, 1), std::string(want.meanr), tag + " MeanR");
    }
    c.expect(sweep.rows[0].second.r1 < sweep.rows[1].second.r1 && sweep.rows[1].second.r1 < sweep.rows[2].second.r1,
             "R@1 increases zero -> few -> full");
    const auto table = retrieval::to_table(sweep);
    c.expect(table.find("0.1196") != std::string::npos && table.find("0.1426") != std::string::npos,
             "sweep table prints the R@1 column");

    const Row en{172, 402, 545, 8, 45.9, "0.171", "0.401", "0.543", "8", "45.9"};
    const auto a = replay(en);
    const auto b = replay(full);
    c.equal(format_fixed(a.r1, 3), std::string("0.171"), "EN R@1");
    c.equal(format_fixed(a.r5, 3), std::string("0.401"), "EN R@5");
    c.equal(format_fixed(a.r10, 3), std::string("0.543"), "EN R@10");
    c.equal(a.median_rank, std::size_t{8}, "EN MedR");
    c.equal(format_fixed(a.mean_rank, 1), std::string("45.9"), "EN MeanR");
    c.equal(format_fixed(b.r1, 3), std::string("0.143"), "AR R@1");
    c.equal(format_fixed(b.r5, 3), std::string("0.358"), "AR R@5");
    c.equal(format_fixed(b.r10, 3), std::string("0.489"), "AR R@10");
    const auto d = retrieval::compare_rounded(a, b, 3);
    c.equal(retrieval::format_delta(d.r1), std::string("Δ-0.028"), "EN->AR delta R@1");
    c.equal(retrieval::format_delta(d.median_rank, 0), std::string("Δ+3"), "EN->AR delta MedR");
    c.expect(retrieval::comparison_table(a, b, "EN", "AR", 3).find("(Δ-0.028)") != std::string::npos,
             "comparison table shows the delta");
}

// --- Arabic normalization -----------------------------------------------------------

void normalization(Checks& c) {
    c.equal(text::strip_diacritics("يضعُ الرَّجُلُ ذِرَاعَهُ الْيُسْرَى تحت ذِرَاعِهِ الْيُمْنَى."),
            std::string("يضع الرجل ذراعه اليسرى تحت ذراعه اليمنى."), "diacritics example");
    std::mt19937_64 rng(777);
    for (int i = 0; i < 10000; ++i) {
        const std::string s = random_arabic(rng, 40);
        const std::string once = text::strip_diacritics(s);
        c.expect(text::strip_diacritics(once) == once, "idempotence on string " + std::to_string(i));
        c.expect(text::tokenize(once).size() == text::tokenize(s).size(), "token count on string " + std::to_string(i));
        c.expect(!text::has_diacritics(once), "no diacritics left on string " + std::to_string(i));
    }
}

// --- detector evaluation --------------------------------------------------------------

void detector(Checks& c) {
    using analytics::DetectorClass;
    using analytics::detector_labels;
    const auto D = ErrorCategory::diacritics, T = ErrorCategory::tense_shift;
    const std::vector<analytics::DetectorLabels> gold = {detector_labels({D}), detector_labels({D}),
                                                         detector_labels({}), detector_labels({T})};
    const std::vector<analytics::DetectorLabels> pred = {detector_labels({D}), detector_labels({}),
                                                         detector_labels({}), detector_labels({T})};
    const auto r = analytics::detector_report(gold, pred);
    auto f4 = [](double v) { return format_fixed(v, 4); };
    c.equal(f4(r[DetectorClass::diacritics].precision), std::string("1.0000"), "diacritics P");
    c.equal(f4(r[DetectorClass::diacritics].recall), std::string("0.5000"), "diacritics R");
    c.equal(f4(r[DetectorClass::diacritics].f1), std::string("0.6667"), "diacritics F1");
    c.equal(f4(r[DetectorClass::no_error].precision), std::string("0.5000"), "no_error P");
    c.equal(f4(r[DetectorClass::no_error].recall), std::string("1.0000"), "no_error R");
    c.equal(f4(r[DetectorClass::no_error].f1), std::string("0.6667"), "no_error F1");
    c.equal(f4(r[DetectorClass::tense_shifting].f1), std::string("1.0000"), "tense F1");
    c.equal(f4(r.exact_set_accuracy), std::string("0.7500"), "accuracy");

    const auto perfect = analytics::detector_report(gold, gold);
    for (const auto& m : perfect.per_class) c.expect(m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0, "perfect");
    c.expect(perfect.macro_f1 == 1.0 && perfect.exact_set_accuracy == 1.0, "perfect macro");

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 80;
        std::vector<analytics::DetectorLabels> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = detector_labels(CategorySet::from_mask(static_cast<std::uint8_t>(rng() % 64)));
            p[i] = detector_labels(CategorySet::from_mask(static_cast<std::uint8_t>(rng() % 64)));
        }
        const auto rep = analytics::detector_report(g, p);
        double macro = 0;
        for (std::size_t k = 0; k < analytics::kDetectorClassCount; ++k) {
            std::vector<bool> gb(n), pb(n);
            for (std::size_t i = 0; i < n; ++i) {
                gb[i] = g[i][k];
                pb[i] = p[i][k];
            }
            macro += oracle::binary_prf(gb, pb).f1;
        }
        c.expect(std::abs(rep.macro_f1 - macro / analytics::kDetectorClassCount) <= 1e-12,
                 "macro F1 labeling " + std::to_string(trial));
    }

    const char* corpus = env("AUTOARABIC_REFERENCE_CORPUS");
    const char* labels = env("AUTOARABIC_REFERENCE_GOLD");
    if (corpus && labels) {
        const auto rep = analytics::detector_report(analytics::parse_label_file(read_file(labels), labels),
                                                    analytics::predicted_labels(load_current(corpus)));
        c.equal(format_fixed(rep.exact_set_accuracy, 2), std::string("0.97"), "reference accuracy");
        c.equal(format_fixed(rep.macro_f1, 2), std::string("0.91"), "reference macro F1");
    } else {
        c.note("reference labels not supplied, published accuracy/F1 not checked");
    }
}

// --- error breakdown ----------------------------------------------------------------

void breakdown(Checks& c) {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<CategorySet> flags;
        std::vector<unsigned> masks;
        const unsigned density = 2 + trial % 6;
        for (int i = 0; i < 500; ++i) {
            unsigned m = 0;
            for (std::size_t k = 0; k < kCategoryCount; ++k) {
                if (rng() % density == 0) m |= 1u << k;
            }
            masks.push_back(m);
            flags.push_back(CategorySet::from_mask(static_cast<std::uint8_t>(m)));
        }
        const auto b = analytics::error_breakdown(flags);
        const double direct = oracle::union_rate(masks);
        c.expect(std::abs(b.union_rate_inclusion_exclusion() - direct) <= 1e-9,
                 "inclusion-exclusion union, assignment " + std::to_string(trial));
        c.expect(std::abs(b.union_rate() - direct) <= 1e-9, "direct union, assignment " + std::to_string(trial));
    }

    const auto D = ErrorCategory::diacritics, L = ErrorCategory::loanword;
    const auto toy = analytics::error_breakdown(std::vector<CategorySet>{{D}, {D, L}, {}});
    c.equal(format_fixed(toy.marginal_rate(D), 1), std::string("66.7"), "toy diacritics");
    c.equal(format_fixed(toy.marginal_rate(L), 1), std::string("33.3"), "toy loanword");
    c.equal(format_fixed(toy.pair_rate(D, L), 1), std::string("33.3"), "toy overlap");
    c.equal(format_fixed(toy.union_rate(), 1), std::string("66.7"), "toy union");

    // A 1,000-caption population with the published marginal and overlap rates.
    const auto T = ErrorCategory::tense_shift, LIT = ErrorCategory::literal, H = ErrorCategory::hallucination;
    const std::vector<std::pair<CategorySet, int>> patterns = {
        {{T, L, D}, 1}, {{L, D}, 70}, {{T, D}, 15}, {{T, L}, 3}, {{D}, 192},
        {{L}, 53},      {{T}, 15},    {{LIT}, 50},  {{H}, 18},   {{}, 583}};
    std::vector<CategorySet> population;
    for (const auto& [set, n] : patterns) population.insert(population.end(), n, set);
    const auto pub = analytics::error_breakdown(population);
    c.equal(pub.total, std::size_t{1000}, "published population size");
    c.equal(format_fixed(pub.marginal_rate(D), 1), std::string("27.8"), "published diacritics");
    c.equal(format_fixed(pub.marginal_rate(L), 1), std::string("12.7"), "published loanword");
    c.equal(format_fixed(pub.marginal_rate(LIT), 1), std::string("5.0"), "published literal");
    c.equal(format_fixed(pub.marginal_rate(T), 1), std::string("3.4"), "published tense");
    c.equal(format_fixed(pub.marginal_rate(H), 1), std::string("1.8"), "published hallucination");
    c.equal(format_fixed(pub.pair_rate(L, D), 1), std::string("7.1"), "published loan+diac");
    c.equal(format_fixed(pub.pair_rate(T, D), 1), std::string("1.6"), "published tense+diac");
    c.equal(format_fixed(pub.pair_rate(T, L), 1), std::string("0.4"), "published tense+loan");
    c.equal(format_fixed(pub.triple_rate(T, L, D), 1), std::string("0.1"), "published triple");
    c.equal(format_fixed(pub.union_rate_inclusion_exclusion(), 1), std::string("41.7"), "published union");

    if (const char* corpus = env("AUTOARABIC_REFERENCE_CORPUS")) {
        const auto b = analytics::error_breakdown(load_current(corpus));
        auto near = [&](double got, double want, const std::string& what) {
            c.expect(std::abs(analytics::round_to(got, 1) - want) <= 0.1 + 1e-9,
                     what + ": got " + format_fixed(got, 1));
        };
        near(b.marginal_rate(D), 27.8, "reference diacritics");
        near(b.marginal_rate(L), 12.7, "reference loanword");
        near(b.pair_rate(L, D), 7.1, "reference overlap");
        near(b.union_rate(), 41.7, "reference union");
    } else {
        c.note("reference corpus not supplied, dataset breakdown not checked");
    }
}

// --- end-to-end determinism ---------------------------------------------------------------

int cli_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

std::string cli_output(std::vector<std::string> args) {
    std::ostringstream out, err;
    if (cli::run(args, out, err) != 0) throw std::runtime_error("command failed: " + err.str());
    return out.str();
}

std::set<std::string> edited_ids(const Corpus& corpus, Budget b) {
    std::set<std::string> out;
    for (const auto& m : materialize(corpus, b)) {
        if (m.text != *corpus.at(m.caption_id).raw_translation) out.insert(m.caption_id);
    }
    return out;
}

void end_to_end(Checks& c) {
    TempDir dir;
    const auto didemo = dir / "didemo.json";
    write_text(didemo, synthetic_didemo(100, 2026));

    auto pipeline = [&](const fs::path& corpus) {
        const std::string p = corpus.string();
        c.expect(cli_run({"--corpus", p, "ingest", "--test", didemo.string()}) == 0, "ingest " + p);
        c.expect(cli_run({"--corpus", p, "--seed", "7", "translate"}) == 0, "translate " + p);
        c.expect(cli_run({"--corpus", p, "--seed", "7", "detect"}) == 0, "detect " + p);
        return cli_output({"--corpus", p, "materialize", "--budget", "zero"});
    };
    const auto ref = dir / "ref.jsonl";
    const std::string ref_table = pipeline(ref);
    const std::string ref_bytes = read_text(ref);
    const auto second = dir / "second.jsonl";
    c.expect(pipeline(second) == ref_table, "materialized tables identical");
    c.expect(read_text(second) == ref_bytes, "corpus files identical across runs");
    c.expect(read_text(meta_path(second)) == read_text(meta_path(ref)), "sidecars identical across runs");
    const Corpus reference = load(ref);
    c.equal(reference.size(), std::size_t{100}, "caption count");

    // Interrupted translation: checkpoints land in the journal, the process
    // dies with a half-written record, and a plain rerun finishes the job.
    for (std::size_t k : {0u, 1u, 37u, 64u, 99u}) {
        const auto path = dir / ("kill" + std::to_string(k) + ".jsonl");
        c.expect(cli_run({"--corpus", path.string(), "ingest", "--test", didemo.string()}) == 0, "ingest");
        if (k > 0) {
            CorpusStore store(path);
            ProviderConfig cfg = ProviderConfig::translation_defaults();
            cfg.requests_per_minute = 1000000;
            CompletionClient client(cfg, std::make_shared<MockBackend>(7));
            TranslateOptions opts;
            opts.limit = k;
            opts.clock = fixed_clock(parse_rfc3339("2026-01-01T00:00:00Z"));
            translate_corpus(store, client, opts);
        }
        {
            std::ofstream journal(journal_path(path), std::ios::app | std::ios::binary);
            journal << "{\"caption_id\":\"half-writ";
        }
        c.expect(cli_run({"--corpus", path.string(), "--seed", "7", "translate"}) == 0, "resume translate");
        c.expect(cli_run({"--corpus", path.string(), "--seed", "7", "detect"}) == 0, "detect after resume");
        c.expect(read_text(path) == ref_bytes, "resume after checkpoint " + std::to_string(k) + " matches");
    }

    // Reviewers edit a deterministic selection under the full budget.
    {
        CorpusStore store(ref);
        ReviewService svc(store, Budget::full, fixed_clock(test_time()));
        std::size_t i = 0;
        for (const auto& [id, r] : reference.captions()) {
            if (i++ % 3 == 0) svc.submit_edit(id, r.latest_text() + " (مراجع)", {}, "reviewer");
        }
        store.compact();
    }
    const Corpus edited = load(ref);
    const auto zero = edited_ids(edited, Budget::zero);
    const auto few = edited_ids(edited, Budget::few);
    const auto full = edited_ids(edited, Budget::full);
    c.expect(zero.empty(), "zero budget applies no edits");
    c.expect(std::includes(few.begin(), few.end(), zero.begin(), zero.end()), "zero within few");
    c.expect(std::includes(full.begin(), full.end(), few.begin(), few.end()), "few within full");
    c.expect(!few.empty() && few.size() < full.size(), "few is a strict, non-empty subset here");
    c.note("edit sets zero/few/full = " + std::to_string(zero.size()) + "/" + std::to_string(few.size()) + "/" +
           std::to_string(full.size()));
}

// --- n-gram statistics ---------------------------------------------------------------------

void statistics(Checks& c) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<std::string>> caps(1 + rng() % 60);
        std::size_t tokens = 0;
        for (auto& cap : caps) {
            cap.resize(rng() % 14);
            for (auto& t : cap) t = "w" + std::to_string(rng() % 6);
            tokens += cap.size();
        }
        const auto s = analytics::ngram_stats(caps, 4);
        c.expect(s.unique == oracle::unique_ngrams(caps, 4), "n-grams corpus " + std::to_string(trial));
        const double mean = static_cast<double>(tokens) / static_cast<double>(caps.size());
        c.expect(std::abs(s.lengths.mean() - mean) <= 1e-12, "mean length corpus " + std::to_string(trial));
    }
    const auto h = analytics::wordcount_histogram(std::vector<std::vector<std::string>>{
        {"a", "b", "c"}, {"d", "e", "f"}, {"g", "h", "i", "j", "k", "l"}});
    c.expect(h.mean() == 4.0, "hand sum mean 4.0");

    if (const char* corpus = env("AUTOARABIC_REFERENCE_CORPUS")) {
        const auto s = analytics::ngram_stats(load_current(corpus), analytics::Side::source, 4);
        c.expect(s.unique == std::vector<std::size_t>{5358, 67698, 140387, 163841}, "reference source n-grams");
    } else {
        c.note("reference corpus not supplied, dataset n-gram counts not checked");
    }
}

// --- review service contract -------------------------------------------------------------

void service(Checks& c) {
    TempDir dir;
    CorpusStore store(dir / "c.jsonl", review_fixture());
    ReviewService svc(store, Budget::few, fixed_clock(test_time()));
    ReviewServer server(store, svc, ServerOptions{"127.0.0.1", 0, {}});
    server.start();
    httplib::Client http("127.0.0.1", server.port());
    auto status = [](const httplib::Result& r) { return r ? r->status : -1; };
    auto post = [&](const std::string& path, const json& body) {
        return http.Post(path, body.dump(), "application/json");
    };
    const std::string tense = "/api/captions/a%232-2%230";

    auto r = http.Get("/api/queue?budget=few");
    c.equal(status(r), 200, "GET queue");
    if (r) c.equal(json::parse(r->body).size(), std::size_t{2}, "queue length");
    c.equal(status(http.Get("/api/queue?budget=some")), 400, "GET queue bad budget");
    c.equal(status(http.Get(tense)), 200, "GET caption");
    c.equal(status(http.Get("/api/captions/a%239-9%230")), 404, "GET unknown caption");

    r = post(tense + "/edit", {{"after", "يخرج الشخص من المشهد."},
                               {"categories", {"tense_shift"}},
                               {"annotator_id", "ann1"},
                               {"version", 0}});
    c.equal(status(r), 200, "POST edit");
    r = http.Get(tense);
    if (r) {
        const auto j = json::parse(r->body);
        c.equal(j["current_text"].get<std::string>(), std::string("يخرج الشخص من المشهد."), "edit visible in GET");
        c.equal(j["version"].get<int>(), 1, "version after edit");
    }
    c.equal(status(post(tense + "/edit", {{"after", "x"}, {"annotator_id", "ann2"}, {"version", 0}})), 409,
            "stale edit");
    c.equal(status(post(tense + "/edit", {{"after", ""}, {"annotator_id", "ann2"}})), 400, "empty edit");
    c.equal(status(http.Post(tense + "/edit", "[1,2", "application/json")), 400, "malformed body");
    c.equal(status(post("/api/captions/a%239-9%230/edit", {{"after", "x"}, {"annotator_id", "a"}})), 404,
            "edit unknown caption");
    c.equal(status(post("/api/captions/a%231-1%230/edit", {{"after", "x"}, {"annotator_id", "a"}})), 409,
            "edit outside budget");
    c.equal(status(post(tense + "/approve", {{"annotator_id", "ann2"}, {"version", 0}})), 409, "stale approve");
    c.equal(status(post(tense + "/approve", {{"annotator_id", "ann2"}, {"version", 1}})), 200, "approve");
    c.equal(status(post("/api/captions/a%230-0%230/approve", {{"version", 0}})), 400, "approve without annotator");
    c.equal(status(http.Get("/api/stats")), 200, "GET stats");

    const Corpus now = store.snapshot();
    for (auto b : {Budget::zero, Budget::few, Budget::full}) {
        r = http.Get("/api/export?budget=" + std::string(to_string(b)));
        c.equal(status(r), 200, "GET export " + std::string(to_string(b)));
        if (!r) continue;
        c.expect(r->body == export_materialized(now, b), "export equals materialization, " + std::string(to_string(b)));
        const Corpus exported = parse_corpus(r->body, "export");
        for (const auto& m : materialize(now, b)) {
            c.expect(exported.at(m.caption_id).current_text == m.text, "exported text of " + m.caption_id);
        }
    }
    c.equal(status(http.Get("/api/export?budget=most")), 400, "GET export bad budget");
    server.stop();
}

}  // namespace

int main() {
    log::set_sink([](log::Level, std::string_view) {});
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"metric oracle equivalence", metric_oracle},
        {"published retrieval numbers replay", published_replay},
        {"normalization suite", normalization},
        {"detector evaluation", detector},
        {"error-breakdown consistency", breakdown},
        {"end-to-end determinism", end_to_end},
        {"statistics oracle", statistics},
        {"service contract", service},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Checks c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS  " : "FAIL  ") << name << "  (" << c.summary() << ")\n";
        failed += c.ok() ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
