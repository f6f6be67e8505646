// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include <jpeglib.h>
#include <unistd.h>

#include "pgt/image_io.hpp"
#include "pgt/rng.hpp"

namespace pgt::test {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("pgt-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(rd() % 100000));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_jpeg(const Canvas& canvas, const fs::path& path, int quality) {
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!file) throw std::runtime_error("cannot open " + path.string());
    jpeg_compress_struct cinfo{};
    jpeg_error_mgr jerr{};
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, file.get());
    cinfo.image_width = static_cast<JDIMENSION>(canvas.width());
    cinfo.image_height = static_cast<JDIMENSION>(canvas.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    const auto pixels = canvas.pixels();
    const auto stride = static_cast<std::size_t>(canvas.width()) * 3;
    while (cinfo.next_scanline < cinfo.image_height) {
        auto* row = const_cast<JSAMPLE*>(pixels.data() + stride * cinfo.next_scanline);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

Canvas test_picture(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    Canvas c(width, height);
    const double fx = rng.uniform(0.01, 0.05), fy = rng.uniform(0.01, 0.05);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const auto noise = static_cast<int>(rng.below(40));
            c.set(x, y,
                  {static_cast<std::uint8_t>((x * 255 / width + noise) % 256),
                   static_cast<std::uint8_t>((y * 255 / height + noise) % 256),
                   static_cast<std::uint8_t>(static_cast<int>(127 + 100 * std::sin(fx * x + fy * y)) + noise / 4)});
        }
    return c;
}

fs::path make_source_dataset(const fs::path& dir, const SourceSpec& spec) {
    const std::vector<std::pair<int, int>> sizes =
        spec.sizes.empty() ? std::vector<std::pair<int, int>>{{640, 480}, {336, 336}, {500, 375}, {224, 300}}
                           : spec.sizes;
    fs::create_directories(dir / "imgs");
    std::vector<std::string> images;
    for (int i = 0; i < spec.distinct_images; ++i) {
        const auto [w, h] = sizes[static_cast<std::size_t>(i) % sizes.size()];
        const auto canvas = test_picture(w, h, static_cast<std::uint64_t>(i) + 1);
        const std::string name = "imgs/" + std::to_string(i) + (i % 2 ? ".jpg" : ".png");
        if (i % 2) write_jpeg(canvas, dir / name);
        else save_image(canvas, dir / name);
        images.push_back(name);
    }
    Json rows = Json::array();
    for (int i = 0; i < spec.rows; ++i) {
        const std::string id = spec.id_prefix + std::to_string(i);
        const bool text_only = spec.text_only_every > 0 && i % spec.text_only_every == spec.text_only_every - 1;
        Json row;
        row["id"] = id;
        if (!text_only) row["image"] = images[static_cast<std::size_t>(i) % images.size()];
        row["source"] = {{"index", i}};
        row["conversations"] = Json::array(
            {{{"from", "human"}, {"value", text_only ? "Say hi." : "<image>\nWhat is shown?"}},
             {{"from", "gpt"}, {"value", text_only ? "Hi." : "A colourful gradient."}}});
        rows.push_back(row);
    }
    const auto path = dir / "data.json";
    write_text_file(path, rows.dump(1));
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree_digest(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), dir).generic_string()] = sha256_hex(read_file(entry.path()));
    return out;
}

Json load_manifest(const fs::path& dir) { return read_json_file(dir / "manifest.json"); }

std::vector<nlohmann::json> load_sidecar(const fs::path& dir) {
    std::vector<nlohmann::json> out;
    for (const auto& line : read_jsonl(dir / "sidecar.jsonl")) out.push_back(nlohmann::json::parse(line.dump()));
    return out;
}

}  // namespace pgt::test
