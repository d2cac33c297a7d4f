// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "autoarabic/corpus.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic::testing {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("autoarabic-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << data;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

/// Captures log messages for the lifetime of the object.
class LogCapture {
public:
    LogCapture()
        : previous_(log::set_sink([this](log::Level level, std::string_view m) {
              lines.emplace_back(level, std::string(m));
          })) {}
    ~LogCapture() { log::set_sink(std::move(previous_)); }

    bool contains(std::string_view needle) const {
        for (const auto& [level, m] : lines) {
            if (m.find(needle) != std::string::npos) return true;
        }
        return false;
    }

    std::vector<std::pair<log::Level, std::string>> lines;

private:
    log::Sink previous_;
};

inline Timestamp test_time() { return parse_rfc3339("2026-03-01T12:00:00Z"); }

/// Synthetic DiDeMo annotation array: `videos` videos with up to three
/// moments each and one to three captions per moment.
inline std::string synthetic_didemo(std::size_t captions, std::uint64_t seed) {
    static const std::vector<std::string> subjects = {"the man", "a woman", "the girl", "a dog", "the camera",
                                                      "two kids", "a person in black", "the boy"};
    static const std::vector<std::string> verbs = {"walks", "runs", "jumps", "turns", "smiles", "points",
                                                   "starts speaking", "picks up", "exits"};
    static const std::vector<std::string> objects = {"the ball", "to the left", "the door", "the car",
                                                     "near the tree", "a red hat", "the frame", "the table"};
    std::mt19937_64 rng(seed);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    std::size_t made = 0;
    for (int v = 0; made < captions; ++v) {
        const std::string video = "vid" + std::to_string(1000 + v) + ".mp4";
        const int moments = 1 + static_cast<int>(rng() % 3);
        for (int m = 0; m < moments && made < captions; ++m) {
            const int start = static_cast<int>(rng() % 6);
            const int end = start + static_cast<int>(rng() % (6 - start));
            const int per_moment = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < per_moment && made < captions; ++k) {
                std::string text = subjects[rng() % subjects.size()] + " " + verbs[rng() % verbs.size()] + " " +
                                   objects[rng() % objects.size()] + ".";
                text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
                nlohmann::ordered_json rec;
                rec["annotation_id"] = static_cast<int>(made) + 1;
                rec["video"] = video;
                rec["description"] = text;
                rec["times"] = {{start, end}, {start, end}, {start, end}, {start, end}};
                rec["num_segments"] = 6;
                arr.push_back(rec);
                ++made;
            }
        }
    }
    return arr.dump(1);
}

/// Five translated captions on one video; two carry detector flags:
///   a#0-0#0  diacritics       (flagged)
///   a#1-1#0  clean
///   a#2-2#0  tense_shift      (flagged)
///   a#3-3#0  clean
///   a#4-4#0  clean
inline Corpus review_fixture() {
    Corpus c;
    c.add_video({"a", Split::test, 6});
    const std::vector<std::pair<std::string, std::string>> texts = {
        {"The gentleman puts his left arm under his right arm.", "يضعُ الرَّجُلُ ذِرَاعَهُ الْيُسْرَى تحت ذِرَاعِهِ الْيُمْنَى."},
        {"The girl starts speaking.", "الفتاة تبدأ بالتحدث."},
        {"Person in black exits frame to left.", "خرج الشخص ذو اللباس الأسود من المشهد نحو اليسار."},
        {"A dog runs.", "كلب يركض."},
        {"The car stops.", "تتوقف السيارة."},
    };
    for (int i = 0; i < 5; ++i) {
        CaptionRecord r;
        r.moment = {"a", i, i};
        r.caption_id = make_caption_id(r.moment, 0);
        r.split = Split::test;
        r.source_text = texts[i].first;
        c.add_caption(r);
        c.record_translation(r.caption_id, texts[i].second);
    }
    auto flag = [&](int i, ErrorCategory cat, FlagSource src) {
        FlagRecord f;
        f.caption_id = make_caption_id({"a", i, i}, 0);
        f.categories.insert(cat);
        f.source_per_category[cat] = src;
        f.judge_raw_output = "FLAGS: " + std::string(to_token(cat));
        f.created_at = test_time();
        c.record_flags(f);
    };
    flag(0, ErrorCategory::diacritics, FlagSource::rule);
    flag(2, ErrorCategory::tense_shift, FlagSource::judge);
    for (int i : {1, 3, 4}) {
        FlagRecord f;
        f.caption_id = make_caption_id({"a", i, i}, 0);
        f.judge_raw_output = "FLAGS: none";
        f.created_at = test_time();
        c.record_flags(f);
    }
    return c;
}

}  // namespace autoarabic::testing
