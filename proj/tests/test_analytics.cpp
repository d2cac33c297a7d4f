// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include <catch_amalgamated.hpp>

#include <random>

#include "autoarabic/analytics.hpp"
#include "autoarabic/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace autoarabic;
using namespace autoarabic::analytics;
using namespace autoarabic::testing;
using Catch::Approx;

namespace {

constexpr auto D = ErrorCategory::diacritics;
constexpr auto L = ErrorCategory::loanword;
constexpr auto T = ErrorCategory::tense_shift;

Corpus tiny_corpus(const std::vector<std::pair<std::string, std::string>>& pairs) {
    Corpus c;
    c.add_video({"v", Split::test, 6});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CaptionRecord r;
        r.moment = {"v", 0, 0};
        r.caption_id = make_caption_id(r.moment, static_cast<int>(i));
        r.source_text = pairs[i].first;
        c.add_caption(r);
        if (!pairs[i].second.empty()) c.record_translation(r.caption_id, pairs[i].second);
    }
    return c;
}

}  // namespace

TEST_CASE("rounding is half away from zero") {
    CHECK(round_to(0.05, 1) == Approx(0.1));
    CHECK(round_to(41.65, 1) == Approx(41.7));
    CHECK(round_to(-0.25, 1) == Approx(-0.3));
    CHECK(format_fixed(2.0 / 3.0 * 100, 1) == "66.7");
    CHECK(format_fixed(0.1196, 4) == "0.1196");
}

TEST_CASE("breakdown of the three-caption example") {
    const auto b = error_breakdown(std::vector<CategorySet>{{D}, {D, L}, {}});
    CHECK(format_fixed(b.marginal_rate(D), 1) == "66.7");
    CHECK(format_fixed(b.marginal_rate(L), 1) == "33.3");
    CHECK(format_fixed(b.pair_rate(D, L), 1) == "33.3");
    CHECK(format_fixed(b.union_rate(), 1) == "66.7");
    CHECK(b.union_rate_inclusion_exclusion() == Approx(b.union_rate()));
    CHECK(b.marginal_rate(T) == 0.0);

    const auto csv = to_csv(b);
    CHECK(csv.find("diacritics,66.7\n") != std::string::npos);
    CHECK(to_table(b).find("union (any category)") != std::string::npos);
}

TEST_CASE("breakdown agrees with direct counting on random flags") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        std::vector<CategorySet> flags;
        std::vector<unsigned> masks;
        for (std::size_t i = 0; i < n; ++i) {
            unsigned m = 0;
            for (std::size_t k = 0; k < kCategoryCount; ++k) {
                if (rng() % 5 == 0) m |= 1u << k;
            }
            masks.push_back(m);
            flags.push_back(CategorySet::from_mask(static_cast<std::uint8_t>(m)));
        }
        const auto b = error_breakdown(flags);
        CHECK(b.union_rate() == Approx(oracle::union_rate(masks)).margin(1e-9));
        CHECK(b.union_rate_inclusion_exclusion() == Approx(oracle::union_rate(masks)).margin(1e-9));
        for (std::size_t i = 0; i < kCategoryCount; ++i) {
            CHECK(b.marginal_rate(kAllCategories[i]) == Approx(oracle::containing_rate(masks, 1u << i)));
            for (std::size_t j = i + 1; j < kCategoryCount; ++j) {
                CHECK(b.pair_rate(kAllCategories[i], kAllCategories[j]) ==
                      Approx(oracle::containing_rate(masks, (1u << i) | (1u << j))));
            }
        }
    }
}

TEST_CASE("breakdown over a corpus needs captions") {
    CHECK_THROWS_AS(error_breakdown(Corpus{}), ValidationError);
    const auto b = error_breakdown(review_fixture());
    CHECK(b.total == 5);
    CHECK(b.union_count == 2);
}

TEST_CASE("n-gram counts of a repeated sequence") {
    const auto s = ngram_stats(std::vector<std::vector<std::string>>{{"a", "b", "a", "b"}});
    CHECK(s.unique == std::vector<std::size_t>{2, 2, 2, 1});
    CHECK(to_csv(s, Side::source) ==
          "name,value\nsource.unique_1gram,2\nsource.unique_2gram,2\nsource.unique_3gram,2\nsource.unique_4gram,1\n");
}

TEST_CASE("n-gram windows do not cross captions") {
    const auto s = ngram_stats(std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}});
    CHECK(s.unique == std::vector<std::size_t>{4, 2, 0, 0});
}

TEST_CASE("n-grams match a set-based count on random token lists") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<std::string>> caps(1 + rng() % 40);
        for (auto& c : caps) {
            c.resize(rng() % 12);
            for (auto& t : c) t = std::string(1, static_cast<char>('a' + rng() % 4));
        }
        CHECK(ngram_stats(caps).unique == oracle::unique_ngrams(caps, 4));
    }
}

TEST_CASE("word-count histogram") {
    const auto h = wordcount_histogram(std::vector<std::vector<std::string>>{
        {"a", "b", "c"}, {"d", "e", "f"}, {"1", "2", "3", "4", "5", "6"}});
    CHECK(h.buckets == std::map<std::size_t, std::size_t>{{3, 2}, {6, 1}});
    CHECK(h.mean() == Approx(4.0));
    CHECK(to_csv(h, Side::target) == "name,value\ntarget.captions,3\ntarget.mean_tokens,4.0\ntarget.tokens_3,2\n"
                                     "target.tokens_6,1\n");
}

TEST_CASE("corpus sides: lowercase English, stripped Arabic") {
    const Corpus c = tiny_corpus({{"The dog. the DOG", "الكلبُ الكلب"}, {"A cat", ""}});
    const auto src = corpus_tokens(c, Side::source);
    REQUIRE(src.size() == 2);
    CHECK(src[0] == std::vector<std::string>{"the", "dog", "the", "dog"});
    TokenOptions keep;
    keep.lowercase_source = false;
    CHECK(corpus_tokens(c, Side::source, keep)[0][3] == "DOG");

    LogCapture logs;
    const auto tgt = corpus_tokens(c, Side::target);
    REQUIRE(tgt.size() == 1);
    CHECK(tgt[0] == std::vector<std::string>{"الكلب", "الكلب"});
    CHECK(ngram_stats(c, Side::target).unique[0] == 1);

    CHECK_THROWS_AS(corpus_tokens(tiny_corpus({{"A cat", ""}}), Side::target), ValidationError);
}

TEST_CASE("POS tag statistics") {
    const Corpus c = tiny_corpus({{"The dog runs fast", "الكلبُ يركض بسرعة"}, {"A dog runs", "كلب يركض"}});
    const auto tags = parse_tag_file("# id\tidx\ttag\nv#0-0#0\t1\tnoun\nv#0-0#0\t2\tverb\nv#0-0#1\t1\tnoun\n"
                                     "v#0-0#1\t2\tverb\nv#0-0#0\t3\tadv\n",
                                     "tags.tsv");
    const auto counts = pos_stats(c, tags, Side::source);
    CHECK(counts.at(PosTag::noun) == 1);
    CHECK(counts.at(PosTag::verb) == 1);
    CHECK(counts.at(PosTag::adv) == 1);

    const auto ar = pos_stats(c, parse_tag_file("v#0-0#0\t0\tnoun\nv#0-0#1\t0\tnoun\n", "t"), Side::target);
    CHECK(ar.at(PosTag::noun) == 2);

    CHECK_THROWS_AS(parse_tag_file("v#0-0#0\tx\tnoun\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_tag_file("v#0-0#0\t1\tpronoun\n", "t"), ParseError);
    CHECK_THROWS_AS(pos_stats(c, parse_tag_file("nope\t0\tnoun\n", "t"), Side::source), RecordValidationError);
    CHECK_THROWS_AS(pos_stats(c, parse_tag_file("v#0-0#1\t9\tnoun\n", "t"), Side::source), RecordValidationError);
}

TEST_CASE("detector metrics on the four-item example") {
    const std::vector<CategorySet> gold = {{D}, {D}, {}, {T}};
    const std::vector<CategorySet> pred = {{D}, {}, {}, {T}};
    std::vector<DetectorLabels> g, p;
    for (const auto& s : gold) g.push_back(detector_labels(s));
    for (const auto& s : pred) p.push_back(detector_labels(s));
    const auto r = detector_report(g, p);
    CHECK(r[DetectorClass::diacritics].precision == Approx(1.0));
    CHECK(r[DetectorClass::diacritics].recall == Approx(0.5));
    CHECK(r[DetectorClass::diacritics].f1 == Approx(2.0 / 3.0));
    CHECK(r[DetectorClass::no_error].precision == Approx(0.5));
    CHECK(r[DetectorClass::no_error].recall == Approx(1.0));
    CHECK(r[DetectorClass::no_error].f1 == Approx(2.0 / 3.0));
    CHECK(r[DetectorClass::tense_shifting].f1 == Approx(1.0));
    CHECK(r[DetectorClass::loanword].f1 == Approx(1.0));
    CHECK(r.exact_set_accuracy == Approx(0.75));
    CHECK(r.macro_f1 == Approx((2.0 / 3.0 * 2 + 3) / 5));
    REQUIRE(r.confusion);
    CHECK((*r.confusion)[0][3] == 1);
}

TEST_CASE("detector classes merge the meaning errors") {
    const auto l = detector_labels({ErrorCategory::lexical, ErrorCategory::literal});
    CHECK(l[static_cast<std::size_t>(DetectorClass::hallucination_literal)]);
    CHECK_FALSE(l[static_cast<std::size_t>(DetectorClass::no_error)]);
    CHECK(detector_labels({})[static_cast<std::size_t>(DetectorClass::no_error)]);
}

TEST_CASE("detector metrics agree with a per-class oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        std::vector<DetectorLabels> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = detector_labels(CategorySet::from_mask(static_cast<std::uint8_t>(rng() % 64)));
            p[i] = detector_labels(CategorySet::from_mask(static_cast<std::uint8_t>(rng() % 64)));
        }
        const auto r = detector_report(g, p);
        double macro = 0;
        for (std::size_t k = 0; k < kDetectorClassCount; ++k) {
            std::vector<bool> gb(n), pb(n);
            for (std::size_t i = 0; i < n; ++i) {
                gb[i] = g[i][k];
                pb[i] = p[i][k];
            }
            const auto o = oracle::binary_prf(gb, pb);
            CHECK(r.per_class[k].precision == Approx(o.precision));
            CHECK(r.per_class[k].recall == Approx(o.recall));
            CHECK(r.per_class[k].f1 == Approx(o.f1));
            macro += o.f1;
        }
        CHECK(r.macro_f1 == Approx(macro / kDetectorClassCount));
    }
    std::vector<DetectorLabels> same = {detector_labels({D}), detector_labels({}), detector_labels({L, T})};
    const auto perfect = detector_report(same, same);
    CHECK(perfect.macro_f1 == Approx(1.0));
    CHECK(perfect.exact_set_accuracy == Approx(1.0));
}

TEST_CASE("label files and key matching") {
    const auto gold = parse_label_file("x\tdiacritics,loanword\ny\tnone\nz\tno_error\n", "gold.tsv");
    CHECK(gold.at("x") == CategorySet{D, L});
    CHECK(gold.at("y").empty());
    CHECK(gold.at("z").empty());
    CHECK_THROWS_AS(parse_label_file("x\tnone\nx\tnone\n", "g"), ParseError);
    CHECK_THROWS_AS(parse_label_file("x\ttypo\n", "g"), ParseError);

    auto pred = gold;
    pred.erase("z");
    pred["w"] = {};
    try {
        detector_report(gold, pred);
        FAIL("expected RecordValidationError");
    } catch (const RecordValidationError& e) {
        CHECK(e.ids() == std::vector<std::string>{"w", "z"});
    }

    const auto predicted = predicted_labels(review_fixture());
    CHECK(predicted.size() == 5);
    CHECK(predicted.at("a#2-2#0") == CategorySet{T});
    const auto csv = to_csv(detector_report(predicted, predicted));
    CHECK(csv.find("macro.f1,1.0000\n") != std::string::npos);
}
