// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Independent answer oracle. Everything here works from recorded geometry
// (sidecar overlay commands and slots) and the rasterizer. It never calls the
// task generators or the template engine.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pgt/record.hpp"
#include "pgt/render.hpp"

namespace pgt {

/// Answer and ground truth recomputed from one sidecar task entry.
struct Rederived {
    std::string answer;
    nlohmann::json truth;
};

/// Recomputes the answer of `task` (one element of a sidecar record's
/// "tasks") from its overlay and slots on a width x height canvas.
/// Throws MalformedRecord on a broken entry and AmbiguityError if the geometry
/// does not determine a unique answer.
Rederived rederive(const nlohmann::json& task, int width, int height);

/// rederive(task, width, height).answer
std::string rederive_answer(const nlohmann::json& task, int width, int height);

/// Number of 4-connected components of non-zero cells in a row-major mask.
std::size_t count_components(const std::vector<std::uint8_t>& mask, int width, int height);

/// Renders the circles of `spec` over black and counts connected components
/// of each circle colour's exact blended value. Colours without circles map to 0.
std::map<ColorId, int> pixel_count_oracle(const OverlaySpec& spec, int width, int height);

struct VerifyOptions {
    /// template id -> pattern. When non-empty every recorded pattern must match.
    std::map<std::string, std::string> known_patterns;
    /// Directory that manifest image paths are relative to. Empty skips image checks.
    std::filesystem::path dataset_dir;
    /// Where image-base records' source images live. When set, those images are
    /// re-composited and compared exactly; otherwise only opaque pixels are checked.
    std::filesystem::path source_root;
    bool check_pixels = true;
    int workers = 0;
};

struct Mismatch {
    std::string id;
    int turn = -1;
    std::string template_id;
    std::string field;  ///< first failed check
    std::string expected;
    std::string found;
    std::vector<std::string> details;  ///< every failed check of the turn
};

/// A problem not tied to one answer; `turn` is -1 for sample-level findings.
struct Violation {
    std::string id;
    int turn = -1;
    std::string detail;
};

struct DistributionSummary {
    std::size_t samples = 0;
    std::size_t turns = 0;
    std::map<std::string, std::size_t> families;
    std::map<std::string, std::size_t> subtasks;
    std::map<std::string, std::size_t> templates;
    /// Per family, answer categories: "relation:left", "tf:True", "letter:B", ...
    std::map<std::string, std::map<std::string, std::size_t>> answers;
    /// Tasks per sample histogram.
    std::map<std::size_t, std::size_t> tasks_per_sample;

    void add(const DistributionSummary& other);
    nlohmann::ordered_json to_json() const;
};

/// Distribution summary straight from sidecar records (no re-derivation).
DistributionSummary summarize(const std::vector<nlohmann::json>& sidecar);

struct VerifyReport {
    std::size_t samples_checked = 0;
    std::size_t turns_checked = 0;
    std::size_t answers_matched = 0;
    std::vector<Mismatch> mismatches;  ///< sorted by (id, turn)
    std::vector<Violation> ambiguity_violations;
    std::vector<Violation> alpha_violations;
    std::vector<Violation> pixel_violations;
    std::vector<Violation> record_violations;
    DistributionSummary distributions;

    bool ok() const;
    nlohmann::ordered_json to_json() const;
};

/// Checks every sidecar record against its manifest row. Throws
/// MalformedRecord when a sidecar id has no manifest row or appears twice.
VerifyReport verify_dataset(const Json& manifest, const std::vector<nlohmann::json>& sidecar,
                            const VerifyOptions& options);

/// Reads `dir`/manifest.json and `dir`/sidecar.jsonl. An empty
/// options.dataset_dir defaults to `dir`.
VerifyReport verify_directory(const std::filesystem::path& dir, VerifyOptions options);

}  // namespace pgt
