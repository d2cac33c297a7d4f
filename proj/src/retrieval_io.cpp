// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include <bit>
#include <cmath>
#include <cstring>

#include "autoarabic/corpus_store.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/retrieval.hpp"

namespace autoarabic::retrieval {

namespace {

std::uint32_t read_u32(std::string_view data, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(data[offset + i]);
    return v;
}

float read_f32(std::string_view data, std::size_t offset) {
    return std::bit_cast<float>(read_u32(data, offset));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

struct Header {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
};

Header read_header(std::string_view data, std::string_view magic, const std::filesystem::path& path) {
    if (data.size() < 12 || data.substr(0, 4) != magic) {
        throw ParseError(path.string(), 0, "expected " + std::string(magic) + " header");
    }
    Header h{read_u32(data, 4), read_u32(data, 8)};
    const std::uint64_t expected = 12 + 4ull * h.rows * h.cols;
    if (data.size() != expected) {
        throw IntegrityError(path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                             std::to_string(data.size()));
    }
    return h;
}

std::vector<std::string> read_ids(const std::filesystem::path& path, std::size_t expected) {
    const std::string data = read_file(path);
    std::vector<std::string> ids;
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        std::string line = data.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? data.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ids.push_back(std::move(line));
    }
    if (ids.size() != expected) {
        throw ValidationError(path.string() + ": " + std::to_string(ids.size()) + " ids for " +
                              std::to_string(expected) + " rows");
    }
    return ids;
}

void write_ids(const std::filesystem::path& path, const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (id.find('\n') != std::string::npos) throw ValidationError("id contains a newline");
        out += id + "\n";
    }
    write_file_atomic(path, out);
}

}  // namespace

std::filesystem::path default_ids_path(const std::filesystem::path& path, std::string_view suffix) {
    auto p = path;
    p += suffix;
    return p;
}

EmbeddingSet read_embeddings(const std::filesystem::path& path, const std::optional<std::filesystem::path>& ids_path) {
    const std::string data = read_file(path);
    const auto h = read_header(data, "EMB1", path);
    EmbeddingSet set;
    set.dim = h.cols;
    set.vectors.resize(static_cast<std::size_t>(h.rows) * h.cols);
    for (std::size_t i = 0; i < set.vectors.size(); ++i) set.vectors[i] = read_f32(data, 12 + 4 * i);
    set.ids = read_ids(ids_path.value_or(default_ids_path(path, ".ids")), h.rows);
    set.validate();
    return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& ids_path) {
    set.validate();
    std::string out = "EMB1";
    put_u32(out, static_cast<std::uint32_t>(set.size()));
    put_u32(out, static_cast<std::uint32_t>(set.dim));
    for (float v : set.vectors) put_f32(out, v);
    write_file_atomic(path, out);
    write_ids(ids_path.value_or(default_ids_path(path, ".ids")), set.ids);
}

SimilarityMatrix read_similarity(const std::filesystem::path& path,
                                 const std::optional<std::filesystem::path>& query_ids_path,
                                 const std::optional<std::filesystem::path>& candidate_ids_path) {
    const std::string data = read_file(path);
    const auto h = read_header(data, "SIM1", path);
    SimilarityMatrix m;
    m.scores.resize(static_cast<std::size_t>(h.rows) * h.cols);
    for (std::size_t i = 0; i < m.scores.size(); ++i) {
        const float v = read_f32(data, 12 + 4 * i);
        if (!std::isfinite(v)) throw ValidationError(path.string() + ": non-finite score at index " + std::to_string(i));
        m.scores[i] = v;
    }
    m.query_ids = read_ids(query_ids_path.value_or(default_ids_path(path, ".qids")), h.rows);
    m.candidate_ids = read_ids(candidate_ids_path.value_or(default_ids_path(path, ".cids")), h.cols);
    return m;
}

void write_similarity(const SimilarityMatrix& m, const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& query_ids_path,
                      const std::optional<std::filesystem::path>& candidate_ids_path) {
    if (m.scores.size() != m.queries() * m.candidates()) throw ValidationError("similarity matrix shape mismatch");
    std::string out = "SIM1";
    put_u32(out, static_cast<std::uint32_t>(m.queries()));
    put_u32(out, static_cast<std::uint32_t>(m.candidates()));
    for (double v : m.scores) put_f32(out, static_cast<float>(v));
    write_file_atomic(path, out);
    write_ids(query_ids_path.value_or(default_ids_path(path, ".qids")), m.query_ids);
    write_ids(candidate_ids_path.value_or(default_ids_path(path, ".cids")), m.candidate_ids);
}

GroundTruth parse_ground_truth(std::string_view data, const std::string& source_name) {
    GroundTruth gt;
    std::size_t pos = 0, line_no = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        std::string_view line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? data.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string_view::npos) {
            throw ParseError(source_name, line_no, "expected query_id<TAB>candidate_id");
        }
        gt[std::string(line.substr(0, tab))].insert(std::string(line.substr(tab + 1)));
    }
    return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    return parse_ground_truth(read_file(path), path.string());
}

std::string format_ground_truth(const SimilarityMatrix& m) {
    std::string out;
    for (std::size_t q = 0; q < m.truth.size(); ++q) {
        for (auto c : m.truth[q]) out += m.query_ids[q] + "\t" + m.candidate_ids[c] + "\n";
    }
    return out;
}

}  // namespace autoarabic::retrieval
