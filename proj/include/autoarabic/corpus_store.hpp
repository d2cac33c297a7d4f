// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "autoarabic/corpus.hpp"

namespace autoarabic {

inline constexpr std::string_view kCorpusHeader = "AUTOARABIC-CORPUS v1";
inline constexpr std::string_view kMetaHeader = "AUTOARABIC-META v1";

using ojson = nlohmann::ordered_json;

ojson to_json(const EditRecord& e);
EditRecord edit_from_json(const nlohmann::json& j, std::string_view caption_id);
ojson to_json(const CaptionRecord& r);
CaptionRecord caption_from_json(const nlohmann::json& j);
ojson to_json(const FlagRecord& f);
FlagRecord flag_record_from_json(const nlohmann::json& j);

/// Corpus file bytes: header line, then one JSON object per caption in
/// caption_id order. Deterministic.
std::string serialize_corpus(const Corpus& corpus);
/// Parses corpus file bytes. Throws IncompatibleVersionError on a foreign
/// version header and IntegrityError on truncation or damage.
Corpus parse_corpus(std::string_view data, const std::string& source_name);

/// SHA-256 of serialize_corpus().
std::string corpus_hash(const Corpus& corpus);

/// Sidecar written next to the corpus file: videos, detector records and
/// per-caption notes, plus a checksum of the corpus file.
std::filesystem::path meta_path(const std::filesystem::path& corpus_path);
std::filesystem::path journal_path(const std::filesystem::path& corpus_path);

/// Writes the corpus file and its sidecar atomically (temp + rename).
void store(const Corpus& corpus, const std::filesystem::path& path);
/// Reads a corpus file and, when present, its sidecar. Does not replay
/// the journal; use CorpusStore for that.
Corpus load(const std::filesystem::path& path);

/// load() plus journal replay, without opening anything for writing.
/// Throws NotFoundError when the corpus file is missing.
Corpus load_current(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// Single-writer durable corpus: snapshot file plus an append-only journal
/// of whole-record updates. Every mutation is journaled before it returns,
/// so a crash loses at most the mutation in flight. Readers take snapshot
/// copies.
class CorpusStore {
public:
    /// Opens `path` (snapshot + journal replay). A missing file yields an
    /// empty corpus.
    explicit CorpusStore(std::filesystem::path path, std::size_t compact_every = 1000);
    CorpusStore(std::filesystem::path path, Corpus initial, std::size_t compact_every = 1000);
    ~CorpusStore();

    CorpusStore(const CorpusStore&) = delete;
    CorpusStore& operator=(const CorpusStore&) = delete;

    Corpus snapshot() const;
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Runs `fn` on the corpus under the writer lock and journals the
    /// resulting state of `caption_id`. If `fn` throws nothing is written.
    void update(std::string_view caption_id, const std::function<void(Corpus&)>& fn);

    /// Read access under the writer lock.
    template <typename F>
    auto read(F&& fn) const {
        std::lock_guard lock(mu_);
        return fn(static_cast<const Corpus&>(corpus_));
    }

    /// Writes a fresh snapshot and truncates the journal.
    void compact();

    std::size_t journal_entries() const;

private:
    void replay_journal();
    void append_journal(std::string_view caption_id);

    std::filesystem::path path_;
    std::size_t compact_every_;
    mutable std::mutex mu_;
    Corpus corpus_;
    std::ofstream journal_;
    std::size_t journal_entries_ = 0;
};

}  // namespace autoarabic
