// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/corpus_store.hpp"

#include <cstdio>
#include <sstream>

#include "autoarabic/errors.hpp"
#include "autoarabic/hash.hpp"

namespace autoarabic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump_line(const ojson& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

template <typename T>
ojson optional_json(const std::optional<T>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<std::string>();
}

}  // namespace

ojson to_json(const EditRecord& e) {
    ojson j;
    j["before"] = e.before;
    j["after"] = e.after;
    j["categories"] = e.categories.tokens();
    j["annotator_id"] = e.annotator_id;
    j["timestamp"] = format_rfc3339(e.timestamp);
    return j;
}

EditRecord edit_from_json(const json& j, std::string_view caption_id) {
    EditRecord e;
    e.caption_id = std::string(caption_id);
    e.before = j.at("before").get<std::string>();
    e.after = j.at("after").get<std::string>();
    e.categories = CategorySet::from_tokens(j.at("categories").get<std::vector<std::string>>());
    e.annotator_id = j.at("annotator_id").get<std::string>();
    e.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
    return e;
}

ojson to_json(const CaptionRecord& r) {
    ojson j;
    j["caption_id"] = r.caption_id;
    j["video_id"] = r.moment.video_id;
    j["split"] = to_string(r.split);
    j["start_segment"] = r.moment.start_segment;
    j["end_segment"] = r.moment.end_segment;
    j["source_text"] = r.source_text;
    j["raw_translation"] = optional_json(r.raw_translation);
    j["current_text"] = optional_json(r.current_text);
    j["status"] = to_string(r.status);
    j["flags"] = r.flags.tokens();
    ojson history = ojson::array();
    for (const auto& e : r.history) history.push_back(to_json(e));
    j["history"] = std::move(history);
    return j;
}

CaptionRecord caption_from_json(const json& j) {
    CaptionRecord r;
    r.caption_id = j.at("caption_id").get<std::string>();
    r.moment.video_id = j.at("video_id").get<std::string>();
    r.split = split_from_string(j.at("split").get<std::string>());
    r.moment.start_segment = j.at("start_segment").get<int>();
    r.moment.end_segment = j.at("end_segment").get<int>();
    r.source_text = j.at("source_text").get<std::string>();
    r.raw_translation = optional_string(j, "raw_translation");
    r.current_text = optional_string(j, "current_text");
    r.status = status_from_string(j.at("status").get<std::string>());
    r.flags = CategorySet::from_tokens(j.at("flags").get<std::vector<std::string>>());
    for (const auto& e : j.at("history")) r.history.push_back(edit_from_json(e, r.caption_id));
    return r;
}

ojson to_json(const FlagRecord& f) {
    ojson j;
    j["caption_id"] = f.caption_id;
    j["categories"] = f.categories.tokens();
    ojson sources = ojson::object();
    for (const auto& tok : f.categories.tokens()) {
        auto c = *category_from_token(tok);
        auto it = f.source_per_category.find(c);
        sources[tok] = it == f.source_per_category.end() ? "judge" : std::string(to_string(it->second));
    }
    j["source_per_category"] = std::move(sources);
    j["judge_raw_output"] = optional_json(f.judge_raw_output);
    j["review_needed"] = f.review_needed;
    j["created_at"] = format_rfc3339(f.created_at);
    return j;
}

FlagRecord flag_record_from_json(const json& j) {
    FlagRecord f;
    f.caption_id = j.at("caption_id").get<std::string>();
    f.categories = CategorySet::from_tokens(j.at("categories").get<std::vector<std::string>>());
    for (const auto& [tok, src] : j.at("source_per_category").items()) {
        auto c = category_from_token(tok);
        if (!c) throw ValidationError("unknown error category '" + tok + "'");
        f.source_per_category[*c] = flag_source_from_string(src.get<std::string>());
    }
    f.judge_raw_output = optional_string(j, "judge_raw_output");
    f.review_needed = j.at("review_needed").get<bool>();
    f.created_at = parse_rfc3339(j.at("created_at").get<std::string>());
    return f;
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out(kCorpusHeader);
    out.push_back('\n');
    for (const auto& [id, r] : corpus.captions()) {
        out += dump_line(to_json(r));
        out.push_back('\n');
    }
    return out;
}

namespace {

struct LineReader {
    std::string_view data;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    // Returns false at end of data. Sets `terminated` to whether the line
    // ended with '\n'.
    bool next(std::string_view& line, bool& terminated) {
        if (pos >= data.size()) return false;
        const auto nl = data.find('\n', pos);
        ++line_no;
        if (nl == std::string_view::npos) {
            line = data.substr(pos);
            terminated = false;
            pos = data.size();
        } else {
            line = data.substr(pos, nl - pos);
            terminated = true;
            pos = nl + 1;
        }
        return true;
    }
};

void check_header(std::string_view line, bool terminated, std::string_view expected, const std::string& source) {
    const auto space = expected.rfind(' ');
    const auto magic = expected.substr(0, space + 1);
    if (line == expected && terminated) return;
    if (line.substr(0, magic.size()) == magic && line != expected) {
        throw IncompatibleVersionError(source + ": unsupported format version '" + std::string(line) +
                                       "' (expected '" + std::string(expected) + "')");
    }
    throw IntegrityError(source + ": missing or damaged header");
}

}  // namespace

Corpus parse_corpus(std::string_view data, const std::string& source_name) {
    LineReader reader{data};
    std::string_view line;
    bool terminated = false;
    if (!reader.next(line, terminated)) throw IntegrityError(source_name + ": empty file");
    check_header(line, terminated, kCorpusHeader, source_name);

    Corpus corpus;
    std::string previous_id;
    while (reader.next(line, terminated)) {
        const std::string where = source_name + ":" + std::to_string(reader.line_no);
        if (!terminated) throw IntegrityError(where + ": truncated record");
        CaptionRecord r;
        try {
            r = caption_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw IntegrityError(where + ": " + e.what());
        } catch (const ValidationError& e) {
            throw IntegrityError(where + ": " + e.what());
        }
        if (!previous_id.empty() && r.caption_id <= previous_id) {
            throw IntegrityError(where + ": records out of order at " + r.caption_id);
        }
        previous_id = r.caption_id;
        corpus.replace(std::move(r));
    }
    return corpus;
}

std::string corpus_hash(const Corpus& corpus) {
    return sha256_hex(serialize_corpus(corpus));
}

fs::path meta_path(const fs::path& corpus_path) {
    return fs::path(corpus_path.string() + ".meta");
}

fs::path journal_path(const fs::path& corpus_path) {
    return fs::path(corpus_path.string() + ".journal");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
    const fs::path tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::string serialize_meta(const Corpus& corpus, const std::string& corpus_sha) {
    std::string out(kMetaHeader);
    out.push_back('\n');
    ojson summary;
    summary["corpus_sha256"] = corpus_sha;
    summary["captions"] = corpus.size();
    out += dump_line(summary) + "\n";
    for (const auto& [id, v] : corpus.videos()) {
        ojson j;
        j["video"] = {{"video_id", v.video_id}, {"split", to_string(v.split)},
                      {"duration_segments", v.duration_segments}};
        out += dump_line(j) + "\n";
    }
    for (const auto& [id, f] : corpus.flag_records()) {
        ojson j;
        j["flag_record"] = to_json(f);
        out += dump_line(j) + "\n";
    }
    for (const auto& [id, note] : corpus.notes()) {
        ojson j;
        j["note"] = {{"caption_id", id}, {"text", note}};
        out += dump_line(j) + "\n";
    }
    return out;
}

void apply_meta(Corpus& corpus, std::string_view data, const std::string& source, const std::string& corpus_sha) {
    LineReader reader{data};
    std::string_view line;
    bool terminated = false;
    if (!reader.next(line, terminated)) throw IntegrityError(source + ": empty file");
    check_header(line, terminated, kMetaHeader, source);
    bool saw_summary = false;
    while (reader.next(line, terminated)) {
        const std::string where = source + ":" + std::to_string(reader.line_no);
        if (!terminated) throw IntegrityError(where + ": truncated record");
        try {
            const json j = json::parse(line);
            if (!saw_summary) {
                saw_summary = true;
                if (j.at("corpus_sha256").get<std::string>() != corpus_sha ||
                    j.at("captions").get<std::size_t>() != corpus.size()) {
                    throw IntegrityError(source + ": checksum does not match the corpus file");
                }
            } else if (j.contains("video")) {
                const auto& v = j["video"];
                corpus.add_video(VideoRef{v.at("video_id").get<std::string>(),
                                          split_from_string(v.at("split").get<std::string>()),
                                          v.at("duration_segments").get<int>()});
            } else if (j.contains("flag_record")) {
                corpus.replace_flag_record(flag_record_from_json(j["flag_record"]));
            } else if (j.contains("note")) {
                corpus.set_note(j["note"].at("caption_id").get<std::string>(),
                                j["note"].at("text").get<std::string>());
            } else {
                throw IntegrityError(where + ": unknown entry");
            }
        } catch (const json::exception& e) {
            throw IntegrityError(where + ": " + e.what());
        } catch (const ValidationError& e) {
            throw IntegrityError(where + ": " + e.what());
        } catch (const NotFoundError& e) {
            throw IntegrityError(where + ": " + e.what());
        }
    }
    if (!saw_summary) throw IntegrityError(source + ": missing checksum line");
}

// Without a sidecar the video table is rebuilt from the captions.
void infer_videos(Corpus& corpus) {
    std::map<std::string, VideoRef> videos;
    for (const auto& [id, r] : corpus.captions()) {
        auto& v = videos[r.moment.video_id];
        v.video_id = r.moment.video_id;
        v.split = r.split;
        v.duration_segments = std::max(v.duration_segments, r.moment.end_segment + 1);
    }
    for (auto& [id, v] : videos) corpus.add_video(std::move(v));
}

}  // namespace

void store(const Corpus& corpus, const fs::path& path) {
    const std::string data = serialize_corpus(corpus);
    const std::string meta = serialize_meta(corpus, sha256_hex(data));
    write_file_atomic(path, data);
    write_file_atomic(meta_path(path), meta);
}

Corpus load(const fs::path& path) {
    const std::string data = read_file(path);
    Corpus corpus = parse_corpus(data, path.string());
    const fs::path meta = meta_path(path);
    if (fs::exists(meta)) {
        apply_meta(corpus, read_file(meta), meta.string(), sha256_hex(data));
    } else {
        infer_videos(corpus);
    }
    return corpus;
}

CorpusStore::CorpusStore(fs::path path, std::size_t compact_every)
    : path_(std::move(path)), compact_every_(compact_every) {
    if (fs::exists(path_)) corpus_ = load(path_);
    replay_journal();
    journal_.open(journal_path(path_), std::ios::binary | std::ios::app);
    if (!journal_) throw Error("cannot open journal " + journal_path(path_).string());
}

CorpusStore::CorpusStore(fs::path path, Corpus initial, std::size_t compact_every)
    : path_(std::move(path)), compact_every_(compact_every), corpus_(std::move(initial)) {
    store(corpus_, path_);
    fs::remove(journal_path(path_));
    journal_.open(journal_path(path_), std::ios::binary | std::ios::app);
    if (!journal_) throw Error("cannot open journal " + journal_path(path_).string());
}

CorpusStore::~CorpusStore() = default;

Corpus CorpusStore::snapshot() const {
    std::lock_guard lock(mu_);
    return corpus_;
}

namespace {

std::size_t replay_journal_into(Corpus& corpus, const fs::path& jp) {
    if (!fs::exists(jp)) return 0;
    const std::string data = read_file(jp);
    LineReader reader{data};
    std::string_view line;
    bool terminated = false;
    std::size_t entries = 0;
    while (reader.next(line, terminated)) {
        // An unterminated tail is a write cut short by a crash; drop it.
        if (!terminated) break;
        try {
            const json j = json::parse(line);
            corpus.replace(caption_from_json(j.at("caption")));
            const auto& id = j["caption"]["caption_id"].get_ref<const std::string&>();
            if (!j.at("flag_record").is_null()) corpus.replace_flag_record(flag_record_from_json(j["flag_record"]));
            if (j.at("note").is_null()) {
                corpus.clear_note(id);
            } else {
                corpus.set_note(id, j["note"].get<std::string>());
            }
        } catch (const std::exception& e) {
            throw IntegrityError(jp.string() + ":" + std::to_string(reader.line_no) + ": " + e.what());
        }
        ++entries;
    }
    return entries;
}

}  // namespace

Corpus load_current(const fs::path& path) {
    if (!fs::exists(path)) throw NotFoundError("corpus file not found: " + path.string());
    Corpus corpus = load(path);
    replay_journal_into(corpus, journal_path(path));
    return corpus;
}

void CorpusStore::replay_journal() { journal_entries_ = replay_journal_into(corpus_, journal_path(path_)); }

void CorpusStore::append_journal(std::string_view caption_id) {
    ojson j;
    j["caption"] = to_json(corpus_.at(caption_id));
    auto fit = corpus_.flag_records().find(caption_id);
    j["flag_record"] = fit == corpus_.flag_records().end() ? ojson(nullptr) : to_json(fit->second);
    auto nit = corpus_.notes().find(caption_id);
    j["note"] = nit == corpus_.notes().end() ? ojson(nullptr) : ojson(nit->second);
    const std::string line = dump_line(j) + "\n";
    journal_.write(line.data(), static_cast<std::streamsize>(line.size()));
    journal_.flush();
    if (!journal_) throw Error("journal write failed: " + journal_path(path_).string());
    ++journal_entries_;
}

void CorpusStore::update(std::string_view caption_id, const std::function<void(Corpus&)>& fn) {
    std::lock_guard lock(mu_);
    fn(corpus_);
    append_journal(caption_id);
    if (compact_every_ > 0 && journal_entries_ >= compact_every_) {
        store(corpus_, path_);
        journal_.close();
        journal_.open(journal_path(path_), std::ios::binary | std::ios::trunc);
        journal_entries_ = 0;
    }
}

void CorpusStore::compact() {
    std::lock_guard lock(mu_);
    store(corpus_, path_);
    journal_.close();
    journal_.open(journal_path(path_), std::ios::binary | std::ios::trunc);
    journal_entries_ = 0;
}

std::size_t CorpusStore::journal_entries() const {
    std::lock_guard lock(mu_);
    return journal_entries_;
}

}  // namespace autoarabic
