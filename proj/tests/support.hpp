// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pgt/canvas.hpp"
#include "pgt/record.hpp"

namespace pgt::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Baseline JPEG writer, used to produce JPEG inputs.
void write_jpeg(const Canvas& canvas, const std::filesystem::path& path, int quality = 90);

/// Smooth colour-noise picture; deterministic in `seed`.
Canvas test_picture(int width, int height, std::uint64_t seed);

struct SourceSpec {
    int rows = 100;
    int distinct_images = 12;  ///< rows cycle through these files
    int text_only_every = 0;   ///< every n-th row has no image (0 = none)
    std::string id_prefix = "s";
    /// Image sizes, cycled. Empty selects a default mix up to 640x480.
    std::vector<std::pair<int, int>> sizes = {};
};

/// Writes `dir`/data.json plus images under `dir`/imgs (PNG and JPEG, several
/// sizes). Rows carry a one-turn conversation and an extra field.
std::filesystem::path make_source_dataset(const std::filesystem::path& dir, const SourceSpec& spec);

std::string read_file(const std::filesystem::path& path);

/// Relative path -> SHA-256 of every regular file under `dir`.
std::map<std::string, std::string> tree_digest(const std::filesystem::path& dir);

Json load_manifest(const std::filesystem::path& dir);
std::vector<nlohmann::json> load_sidecar(const std::filesystem::path& dir);

}  // namespace pgt::test
