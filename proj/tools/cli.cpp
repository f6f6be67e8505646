// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include "pgt/error.hpp"
#include "pgt/image_io.hpp"
#include "pgt/pipeline.hpp"
#include "pgt/verify.hpp"

namespace pgt {

namespace fs = std::filesystem;

namespace {

/// Flags shared by the generating subcommands. Unset flags leave the config
/// file (or default) value in place.
struct GenerateFlags {
    std::optional<std::string> config_file;
    std::optional<std::string> input, output, image_root, passthrough;
    std::optional<std::uint64_t> seed;
    std::optional<double> proportion;
    std::optional<int> tasks_per_image, count, extra, workers;
    std::optional<int> width, height, gray_level, png_compression;
    bool no_images = false;
    bool force = false;
    bool quiet = false;
};

void add_common(CLI::App& cmd, GenerateFlags& f) {
    cmd.add_option("--config", f.config_file, "JSON config file; flags override its values");
    cmd.add_option("--output,-o", f.output, "Output directory");
    cmd.add_option("--seed", f.seed, "Global seed");
    cmd.add_option("--tasks-per-image,-k", f.tasks_per_image, "Distinct task families per image (1-3)");
    cmd.add_option("--workers,-j", f.workers, "Worker threads (0 = all cores)");
    cmd.add_option("--png-compression", f.png_compression, "zlib level for written PNGs (0-9)");
    cmd.add_flag("--no-images", f.no_images, "Skip writing composited PNGs");
    cmd.add_flag("--force", f.force, "Overwrite an existing output manifest");
    cmd.add_flag("--quiet,-q", f.quiet, "Do not echo the resolved config");
}

void add_input(CLI::App& cmd, GenerateFlags& f) {
    cmd.add_option("--input,-i", f.input, "Input manifest (JSON array of samples)");
    cmd.add_option("--image-root", f.image_root, "Directory image paths are relative to (default: manifest dir)");
    cmd.add_option("--passthrough", f.passthrough, "Pass-through images: copy or reference")
        ->check(CLI::IsMember({"copy", "reference"}));
}

PipelineConfig resolve(Mode mode, const GenerateFlags& f) {
    PipelineConfig cfg;
    cfg.mode = mode;
    if (f.config_file) {
        if (!fs::exists(*f.config_file)) throw ConfigError("--config: no such file " + *f.config_file);
        Json j;
        try {
            j = read_json_file(*f.config_file);
        } catch (const Error& e) {
            throw ConfigError(std::string("--config: ") + e.what());
        }
        cfg = PipelineConfig::from_json(j, cfg);
        if (cfg.mode != mode)
            throw ConfigError("--config: mode '" + std::string(to_string(cfg.mode)) + "' does not match the " +
                              std::string(to_string(mode)) + " subcommand");
    }
    const auto set = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    set(cfg.seed, f.seed);
    set(cfg.proportion, f.proportion);
    set(cfg.tasks_per_image, f.tasks_per_image);
    set(cfg.count, f.count);
    set(cfg.extra, f.extra);
    set(cfg.workers, f.workers);
    set(cfg.render.gray_width, f.width);
    set(cfg.render.gray_height, f.height);
    set(cfg.render.gray_level, f.gray_level);
    set(cfg.render.png_compression, f.png_compression);
    if (f.input) cfg.input = *f.input;
    if (f.output) cfg.output = *f.output;
    if (f.image_root) cfg.image_root = *f.image_root;
    if (f.passthrough) cfg.passthrough = *f.passthrough == "copy" ? PassthroughImages::Copy : PassthroughImages::Reference;
    if (f.no_images) cfg.write_images = false;
    cfg.force = f.force;
    if (cfg.mode != Mode::GrayStandalone && !cfg.input.empty() && !fs::exists(cfg.input))
        throw ConfigError("--input: no such file " + cfg.input.string());
    if (cfg.output.empty()) throw ConfigError("--output is required");
    cfg.validate();
    return cfg;
}

int run_generation(Mode mode, const GenerateFlags& f, std::ostream& out, std::ostream& err) {
    const auto cfg = resolve(mode, f);
    if (!f.quiet) err << "pgtgen: resolved config\n" << cfg.to_json().dump(2) << "\n";
    const auto report = run_pipeline(cfg);
    out << report.to_json().dump(2) << "\n";
    return kExitOk;
}

fs::path require_dataset(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("dataset directory not found: " + dir);
    for (const char* name : {"manifest.json", "sidecar.jsonl"})
        if (!fs::exists(fs::path(dir) / name))
            throw ConfigError("dataset " + dir + " has no " + name);
    return dir;
}

/// Built-in patterns plus any templates the dataset's config.json registered.
std::map<std::string, std::string> dataset_patterns(const fs::path& dir) {
    auto registry = TemplateRegistry::builtin();
    const auto config_path = dir / "config.json";
    if (fs::exists(config_path)) {
        const auto cfg = read_json_file(config_path);
        if (cfg.contains("templates") && !cfg.at("templates").empty())
            registry.apply_config(nlohmann::json::parse(cfg.at("templates").dump()));
    }
    return registry.patterns();
}

std::vector<nlohmann::json> read_sidecar(const fs::path& dir) {
    std::vector<nlohmann::json> out;
    for (const auto& line : read_jsonl(dir / "sidecar.jsonl")) out.push_back(nlohmann::json::parse(line.dump()));
    return out;
}

int run_preview(const std::string& dataset, const std::string& output, int k, std::ostream& out) {
    const auto dir = require_dataset(dataset);
    if (k < 1) throw ConfigError("--k must be >= 1");
    const auto sidecar = read_sidecar(dir);
    fs::create_directories(output);
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), sidecar.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& record = sidecar[i];
        const auto id = record.at("id").get<std::string>();
        const auto stem = image_file_stem(id);
        const fs::path image = dir / record.at("image").get<std::string>();
        Canvas canvas(1, 1, {});
        if (fs::exists(image)) {
            canvas = load_image(image);
        } else if (record.at("base").at("kind") == "gray") {
            // Datasets written without images can still be previewed.
            const int w = record.at("canvas").at("width").get<int>();
            const int h = record.at("canvas").at("height").get<int>();
            canvas = gray_canvas(w, h, record.at("base").at("level").get<std::uint8_t>());
            for (const auto& task : record.at("tasks")) compose_into(canvas, overlay_from_json(task.at("overlay")));
        } else {
            throw MissingFile("image not found: " + image.string());
        }
        save_image(canvas, fs::path(output) / (stem + ".png"));
        std::string text = "id: " + id + "\n";
        for (const auto& task : record.at("tasks"))
            text += "\n[" + task.at("template_id").get<std::string>() + "]\nQ: " +
                    task.at("question").get<std::string>() + "\nA: " + task.at("answer").get<std::string>() + "\n";
        write_text_file(fs::path(output) / (stem + ".txt"), text);
    }
    out << "wrote " << n << " previews to " << output << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pgtgen: procedurally generated task augmentation for visual instruction data"};
    app.require_subcommand(1);

    GenerateFlags aug_flags, gen_flags, sep_flags;
    auto* augment = app.add_subcommand("augment", "Overlay tasks on a proportion of an existing dataset");
    add_common(*augment, aug_flags);
    add_input(*augment, aug_flags);
    augment->add_option("--proportion,-p", aug_flags.proportion, "Fraction of samples to augment, in (0,1]");

    auto* generate = app.add_subcommand("generate", "Standalone samples on uniform gray canvases");
    add_common(*generate, gen_flags);
    generate->add_option("--count,-n", gen_flags.count, "Number of samples");
    generate->add_option("--width", gen_flags.width, "Canvas width in pixels");
    generate->add_option("--height", gen_flags.height, "Canvas height in pixels");
    generate->add_option("--gray-level", gen_flags.gray_level, "Background gray level (0-255)");

    auto* separate = app.add_subcommand("separate", "Keep the dataset and append synthetic task samples");
    add_common(*separate, sep_flags);
    add_input(*separate, sep_flags);
    separate->add_option("--extra,-n", sep_flags.extra, "Number of synthetic samples appended");

    std::string verify_dir, source_root, report_path;
    bool no_pixels = false;
    int verify_workers = 0;
    auto* verify = app.add_subcommand("verify", "Re-derive every answer and report mismatches");
    verify->add_option("dataset", verify_dir, "Dataset directory (manifest.json + sidecar.jsonl)")->required();
    verify->add_option("--source-root", source_root, "Directory of original images for exact re-render checks");
    verify->add_option("--report", report_path, "Also write the report JSON here");
    verify->add_option("--workers,-j", verify_workers, "Worker threads (0 = all cores)");
    verify->add_flag("--no-pixels", no_pixels, "Skip image and pixel-oracle checks");

    std::string stats_dir;
    auto* stats = app.add_subcommand("stats", "Family, template and answer distributions of a dataset");
    stats->add_option("dataset", stats_dir, "Dataset directory")->required();

    std::string preview_dir, preview_out;
    int preview_k = 8;
    auto* preview = app.add_subcommand("preview", "Write K images with their question/answer text");
    preview->add_option("dataset", preview_dir, "Dataset directory")->required();
    preview->add_option("--output,-o", preview_out, "Inspection directory")->required();
    preview->add_option("--k", preview_k, "Number of samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "pgtgen: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (augment->parsed()) return run_generation(Mode::Overlay, aug_flags, out, err);
        if (generate->parsed()) return run_generation(Mode::GrayStandalone, gen_flags, out, err);
        if (separate->parsed()) return run_generation(Mode::Separate, sep_flags, out, err);
        if (verify->parsed()) {
            const auto dir = require_dataset(verify_dir);
            if (!source_root.empty() && !fs::is_directory(source_root))
                throw ConfigError("--source-root: no such directory " + source_root);
            VerifyOptions options;
            options.known_patterns = dataset_patterns(dir);
            options.source_root = source_root;
            options.check_pixels = !no_pixels;
            options.workers = verify_workers;
            const auto report = verify_directory(dir, options);
            const auto text = report.to_json().dump(2) + "\n";
            out << text;
            if (!report_path.empty()) write_text_file(report_path, text);
            err << "pgtgen: verified " << report.turns_checked << " turns in " << report.samples_checked
                << " samples: " << report.answers_matched << " matched, " << report.mismatches.size()
                << " mismatches\n";
            return report.ok() ? kExitOk : kExitFailure;
        }
        if (stats->parsed()) {
            const auto dir = require_dataset(stats_dir);
            out << summarize(read_sidecar(dir)).to_json().dump(2) << "\n";
            return kExitOk;
        }
        if (preview->parsed()) return run_preview(preview_dir, preview_out, preview_k, out);
    } catch (const ConfigError& e) {
        err << "pgtgen: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "pgtgen: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "pgtgen: error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace pgt
