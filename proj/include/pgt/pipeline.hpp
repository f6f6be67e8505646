// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pgt/canvas.hpp"
#include "pgt/record.hpp"
#include "pgt/rng.hpp"
#include "pgt/tasks.hpp"
#include "pgt/templates.hpp"

namespace pgt {

enum class Mode : std::uint8_t { Overlay, Separate, GrayStandalone };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

/// How pass-through images reach the output directory.
enum class PassthroughImages : std::uint8_t {
    Copy,       ///< byte-for-byte copy under the same relative path
    Reference,  ///< left where they are; the manifest row keeps its path
};

struct RenderParams {
    int gray_width = 448;
    int gray_height = 448;
    int gray_level = 200;
    int png_compression = 6;
};

struct PipelineConfig {
    Mode mode = Mode::Overlay;
    std::uint64_t seed = 0;
    double proportion = 1.0;
    int tasks_per_image = 1;
    /// Gray mode: number of samples.
    int count = 0;
    /// Separate mode: number of synthetic samples appended.
    int extra = 0;

    TaskParams tasks;
    RenderParams render;
    /// Template registry changes: {"add": [...], "enable": [...], "disable": [...]}.
    Json templates = Json::object();

    std::filesystem::path input;
    std::filesystem::path output;
    /// Directory image paths are relative to; empty means the manifest's directory.
    std::filesystem::path image_root;
    PassthroughImages passthrough = PassthroughImages::Copy;

    bool write_images = true;
    bool force = false;
    /// 0 selects the hardware concurrency. Never affects output bytes.
    int workers = 0;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
    Json to_json() const;
    /// Overlays the keys present in `j` onto `base`. Unknown keys are errors.
    static PipelineConfig from_json(const Json& j, PipelineConfig base);
    static PipelineConfig from_json(const Json& j);
};

/// Stream for one sample: SHA-256(seed || sample_id) feeds the generator.
Rng derive_sample_rng(std::uint64_t global_seed, std::string_view sample_id);

/// Sidecar line of one augmented or synthetic sample.
struct SidecarRecord {
    std::string id;
    Json json;
};

struct Augmentation {
    DatasetSample sample;  ///< conversations extended with the PGT turns
    Canvas canvas;         ///< composited image
    SidecarRecord sidecar;
    std::vector<TaskInstance> instances;
    std::vector<QAPair> qa;
};

/// Per-sample augmentation: draw families, sample overlays, compose, fill
/// templates, append turns. Immutable after construction; safe to share.
class Augmenter {
public:
    Augmenter(PipelineConfig config, TemplateRegistry registry);

    const PipelineConfig& config() const { return config_; }
    const TemplateRegistry& registry() const { return registry_; }

    /// Throws SamplingExhausted if any task cannot be placed.
    /// `image_ref` is the output image path; `base` describes the canvas origin
    /// for the sidecar. The first PGT question gets an image token when the
    /// input conversation is empty.
    Augmentation augment(const DatasetSample& sample, const Canvas& canvas, Rng& rng,
                         const std::string& image_ref, const Json& base) const;

private:
    PipelineConfig config_;
    TemplateRegistry registry_;
};

struct RunReport {
    std::string mode;
    std::size_t input_samples = 0;
    std::size_t output_samples = 0;
    std::size_t augmented = 0;
    std::size_t pass_through = 0;
    std::size_t ineligible = 0;  ///< rows without an image
    std::vector<std::pair<std::string, std::string>> failures;  ///< (id, reason), input order
    std::map<std::string, std::size_t> families;
    std::map<std::string, std::size_t> subtasks;
    std::map<std::string, std::size_t> templates;
    std::size_t copied_images = 0;
    std::vector<std::string> missing_images;  ///< pass-through images that could not be copied
    double wall_time_s = 0.0;

    Json to_json() const;
};

/// Builds the registry from the built-ins plus `config.templates`.
TemplateRegistry make_registry(const PipelineConfig& config);

/// Overlay mode: floor(proportion * N) rows augmented in place, the rest pass through.
RunReport augment_dataset(const PipelineConfig& config);

/// Gray-background standalone set of `config.count` samples.
RunReport generate_gray_dataset(const PipelineConfig& config);

/// Original rows untouched plus `config.extra` synthetic rows.
RunReport generate_separate(const PipelineConfig& config);

/// Dispatches on `config.mode`.
RunReport run_pipeline(const PipelineConfig& config);

/// Ids selected for augmentation: the floor(proportion * N) eligible ids with
/// the smallest seeded hash rank. Independent of manifest order.
std::vector<std::string> select_for_augmentation(const std::vector<DatasetSample>& samples,
                                                 std::uint64_t seed, double proportion);

/// Output file names used for composited images.
std::string image_file_stem(std::string_view sample_id);

}  // namespace pgt
