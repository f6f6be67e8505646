// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgt/render.hpp"

namespace pgt {

/// Insertion-ordered JSON; manifests keep their key order and unknown fields.
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSidecarSchema = "pgtgen.sidecar/1";
inline constexpr std::string_view kImageToken = "<image>";

Json overlay_to_json(const OverlaySpec& spec);

/// Throws MalformedRecord on unknown command types or missing/ill-typed fields.
template <typename JsonT>
OverlaySpec overlay_from_json(const JsonT& commands);

struct Turn {
    std::string from;  ///< "human" or "gpt"
    std::string value;
};

/// One manifest row. `raw` is the row exactly as parsed, so rows that are not
/// augmented can be written back unchanged.
struct DatasetSample {
    std::string id;
    std::optional<std::string> image;
    std::vector<Turn> conversations;
    Json raw;
};

/// Validates a row: string id, conversations alternating human/gpt starting
/// with human, and, when an image is present, exactly one image token in the
/// first human turn. Throws MalformedRecord naming the sample.
DatasetSample sample_from_json(const Json& row);

/// Parses a manifest array and rejects duplicate ids.
std::vector<DatasetSample> parse_manifest(const Json& manifest);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// One JSON object per line; blank lines are skipped.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace pgt
