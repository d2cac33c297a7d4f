// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <filesystem>
#include <vector>

#include "autoarabic/corpus.hpp"

namespace autoarabic {

struct DidemoSource {
    std::filesystem::path path;
    Split split = Split::train;
};

/// Builds a pending corpus from DiDeMo annotation files.
///
/// Accepts the published layout (a JSON array of objects with `video`,
/// `description`, `times` as a list of [start, end] segment pairs from
/// several annotators, optional `num_segments` and `annotation_id`) and a
/// line-per-record variant of the same objects. Explicit `video_id`,
/// `start_segment`, `end_segment` fields take precedence over `video` and
/// `times`. When `times` disagree, the most frequent pair wins, earliest
/// first on ties. Videos without `num_segments` get 6 segments (30 s).
///
/// Throws ParseError (file and line) for malformed input and
/// RecordValidationError listing every caption whose moment falls outside
/// its video.
Corpus ingest_didemo(const std::vector<DidemoSource>& sources);

}  // namespace autoarabic
