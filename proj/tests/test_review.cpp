// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include <catch_amalgamated.hpp>

#include "autoarabic/errors.hpp"
#include "autoarabic/review.hpp"
#include "support.hpp"

using namespace autoarabic;
using namespace autoarabic::testing;

namespace {

std::vector<std::string> ids(const std::vector<ReviewTask>& tasks) {
    std::vector<std::string> out;
    for (const auto& t : tasks) out.push_back(t.caption_id);
    return out;
}

std::map<std::string, std::string> as_map(const std::vector<MaterializedCaption>& m) {
    std::map<std::string, std::string> out;
    for (const auto& c : m) out[c.caption_id] = c.text;
    return out;
}

}  // namespace

TEST_CASE("budgets select the queue") {
    const Corpus c = review_fixture();
    CHECK(build_queue(c, Budget::zero).empty());
    CHECK(ids(build_queue(c, Budget::few)) == std::vector<std::string>{"a#0-0#0", "a#2-2#0"});
    CHECK(ids(build_queue(c, Budget::full)) ==
          std::vector<std::string>{"a#0-0#0", "a#2-2#0", "a#1-1#0", "a#3-3#0", "a#4-4#0"});
    CHECK(budget_from_string("few") == Budget::few);
    CHECK_THROWS_AS(budget_from_string("some"), ValidationError);
}

TEST_CASE("diacritics-only tasks carry a suggested fix") {
    const auto q = build_queue(review_fixture(), Budget::few);
    REQUIRE(q.size() == 2);
    REQUIRE(q[0].suggested_fix);
    CHECK(*q[0].suggested_fix == "يضع الرجل ذراعه اليسرى تحت ذراعه اليمنى.");
    CHECK_FALSE(q[1].suggested_fix);
    CHECK(q[1].flags == CategorySet{ErrorCategory::tense_shift});
    CHECK(q[0].version == 0);
}

TEST_CASE("materialization per budget") {
    Corpus c = review_fixture();
    c.append_edit({"a#2-2#0", c.at("a#2-2#0").latest_text(), "يخرج الشخص ذو اللباس الأسود من المشهد نحو اليسار.",
                   {ErrorCategory::tense_shift}, "ann1", test_time()});
    c.append_edit({"a#3-3#0", "كلب يركض.", "يركض كلب.", {ErrorCategory::lexical}, "ann1", test_time()});

    const auto zero = as_map(materialize(c, Budget::zero));
    const auto few = as_map(materialize(c, Budget::few));
    const auto full = as_map(materialize(c, Budget::full));
    CHECK(zero.size() == 5);
    CHECK(zero.at("a#2-2#0") == "خرج الشخص ذو اللباس الأسود من المشهد نحو اليسار.");
    CHECK(few.at("a#2-2#0") == "يخرج الشخص ذو اللباس الأسود من المشهد نحو اليسار.");
    CHECK(few.at("a#3-3#0") == "كلب يركض.");
    CHECK(full.at("a#3-3#0") == "يركض كلب.");
    CHECK(edit_application_count(c, Budget::zero) == 0);
    CHECK(edit_application_count(c, Budget::few) == 1);
    CHECK(edit_application_count(c, Budget::full) == 2);

    const Corpus exported = parse_corpus(export_materialized(c, Budget::few), "export");
    CHECK(exported.at("a#2-2#0").current_text == few.at("a#2-2#0"));
    CHECK(exported.at("a#3-3#0").current_text == "كلب يركض.");
}

TEST_CASE("service edits, approvals and version checks") {
    TempDir dir;
    CorpusStore store(dir / "c.jsonl", review_fixture());
    ReviewService svc(store, Budget::few, fixed_clock(test_time()));

    const auto e = svc.submit_edit("a#2-2#0", "يخرج الشخص من المشهد.", {ErrorCategory::tense_shift}, "ann1", 0);
    CHECK(e.before == "خرج الشخص ذو اللباس الأسود من المشهد نحو اليسار.");
    CHECK(e.timestamp == test_time());
    CHECK(store.snapshot().at("a#2-2#0").status == Status::edited);

    CHECK_THROWS_AS(svc.submit_edit("a#2-2#0", "نص آخر.", {}, "ann2", 0), ConflictError);
    CHECK_THROWS_AS(svc.submit_edit("a#1-1#0", "نص.", {}, "ann1"), ConflictError);
    CHECK_THROWS_AS(svc.submit_edit("a#9-9#0", "نص.", {}, "ann1"), NotFoundError);
    CHECK_THROWS_AS(svc.submit_edit("a#0-0#0", "   ", {}, "ann1"), ValidationError);
    CHECK_THROWS_AS(svc.submit_edit("a#0-0#0", "نص.", {}, ""), ValidationError);

    auto r = svc.approve("a#2-2#0", "ann2", 1);
    CHECK(r.applied);
    CHECK(store.snapshot().at("a#2-2#0").status == Status::approved);
    r = svc.approve("a#2-2#0", "ann2");
    CHECK_FALSE(r.applied);
    CHECK(r.warning);
    CHECK_THROWS_AS(svc.submit_edit("a#2-2#0", "x.", {}, "ann1"), ConflictError);

    const auto done = svc.queue(Budget::few, TaskState::done);
    CHECK(ids(done) == std::vector<std::string>{"a#2-2#0"});
}

TEST_CASE("claims and skips are session state") {
    TempDir dir;
    CorpusStore store(dir / "c.jsonl", review_fixture());
    ReviewService svc(store, Budget::full, fixed_clock(test_time()));
    svc.claim("a#0-0#0", "ann1");
    svc.claim("a#0-0#0", "ann1");
    CHECK_THROWS_AS(svc.claim("a#0-0#0", "ann2"), ConflictError);
    svc.skip("a#3-3#0");
    CHECK_THROWS_AS(svc.skip("zzz"), NotFoundError);

    const auto q = svc.queue(Budget::full);
    CHECK(q[0].state == TaskState::in_progress);
    CHECK(q[0].assigned_to == "ann1");
    CHECK(ids(svc.queue(Budget::full, TaskState::skipped)) == std::vector<std::string>{"a#3-3#0"});

    svc.submit_edit("a#0-0#0", "يضع الرجل ذراعه اليسرى تحت ذراعه اليمنى.", {ErrorCategory::diacritics}, "ann2");
    CHECK(svc.queue(Budget::full)[0].state == TaskState::done);
}

TEST_CASE("edits persist through the journal") {
    TempDir dir;
    const auto path = dir / "c.jsonl";
    {
        CorpusStore store(path, review_fixture());
        ReviewService svc(store, Budget::few, fixed_clock(test_time()));
        svc.submit_edit("a#2-2#0", "يخرج الشخص.", {ErrorCategory::tense_shift}, "ann1");
    }
    const Corpus c = load_current(path);
    CHECK(c.at("a#2-2#0").current_text == "يخرج الشخص.");
    CHECK(c.at("a#2-2#0").history.size() == 1);
}
