// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pgt/cli.hpp"
#include "support.hpp"

using namespace pgt;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "pgtgen");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> digest_without_run_info(const fs::path& dir) {
    auto d = pgt::test::tree_digest(dir);
    d.erase("report.json");
    d.erase("config.json");
    return d;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    pgt::test::TempDir dir("cli-usage");
    const auto src = pgt::test::make_source_dataset(dir.path(), {.rows = 6});
    CHECK(run({"augment", "-i", src.string(), "-o", (dir / "o").string(), "--proportion", "1.5"}).code == 2);
    CHECK(run({"augment", "-i", src.string(), "-o", (dir / "o").string(), "--proportion", "0"}).code == 2);
    CHECK(run({"generate", "-o", (dir / "g").string(), "--count", "0"}).code == 2);
    CHECK(run({"generate", "-o", (dir / "g").string(), "-n", "3", "-k", "4"}).code == 2);
    CHECK(run({"generate", "-n", "3"}).code == 2);
    CHECK(run({"augment", "-o", (dir / "o").string()}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"generate", "-o", (dir / "g").string(), "--bogus"}).code == 2);
    CHECK_FALSE(fs::exists(dir / "g" / "manifest.json"));
}

TEST_CASE("help exits with 0") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("augment") != std::string::npos);
    CHECK(run({"generate", "--help"}).code == 0);
}

TEST_CASE("missing paths exit with 2") {
    pgt::test::TempDir dir("cli-missing");
    CHECK(run({"augment", "-i", (dir / "nope.json").string(), "-o", (dir / "o").string()}).code == 2);
    CHECK(run({"verify", (dir / "nope").string()}).code == 2);
    CHECK(run({"stats", (dir / "nope").string()}).code == 2);
    CHECK(run({"preview", (dir / "nope").string(), "-o", (dir / "p").string()}).code == 2);
    CHECK(run({"generate", "-o", (dir / "g").string(), "--config", (dir / "nope.json").string()}).code == 2);
}

TEST_CASE("generate, verify, corrupt, verify") {
    pgt::test::TempDir dir("cli-verify");
    const auto out = (dir / "g").string();
    auto r = run({"generate", "-o", out, "-n", "40", "-k", "2", "--seed", "9", "-q"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["output_samples"] == 40);
    r = run({"verify", out});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["ok"] == true);

    auto manifest = pgt::test::load_manifest(out);
    manifest[5]["conversations"][3]["value"] = "Z";
    std::ofstream(fs::path(out) / "manifest.json") << manifest.dump(2);
    r = run({"verify", out, "--report", (dir / "report.json").string()});
    CHECK(r.code == 1);
    const auto report = nlohmann::json::parse(pgt::test::read_file(dir / "report.json"));
    REQUIRE(report["mismatches"].size() == 1);
    CHECK(report["mismatches"][0]["id"] == manifest[5]["id"]);
    CHECK(report["mismatches"][0]["turn"] == 2);
}

TEST_CASE("stats reports distributions") {
    pgt::test::TempDir dir("cli-stats");
    const auto out = (dir / "g").string();
    REQUIRE(run({"generate", "-o", out, "-n", "30", "--no-images", "-q"}).code == 0);
    const auto r = run({"stats", out});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["samples"] == 30);
    CHECK(j["families"].size() >= 1);
}

TEST_CASE("preview writes k image/text pairs") {
    pgt::test::TempDir dir("cli-preview");
    const auto out = (dir / "g").string();
    REQUIRE(run({"generate", "-o", out, "-n", "20", "-q"}).code == 0);
    REQUIRE(run({"preview", out, "-o", (dir / "p").string(), "--k", "8"}).code == 0);
    int png = 0, txt = 0;
    for (const auto& e : fs::directory_iterator(dir / "p")) {
        png += e.path().extension() == ".png";
        txt += e.path().extension() == ".txt";
    }
    CHECK(png == 8);
    CHECK(txt == 8);
}

TEST_CASE("reruns are byte-identical") {
    pgt::test::TempDir dir("cli-rerun");
    const auto src = pgt::test::make_source_dataset(dir.path(), {.rows = 30, .distinct_images = 4});
    for (const char* o : {"a", "b"})
        REQUIRE(run({"augment", "-i", src.string(), "-o", (dir / o).string(), "-p", "0.5", "--seed", "3", "-q"})
                    .code == 0);
    REQUIRE(run({"augment", "-i", src.string(), "-o", (dir / "c").string(), "-p", "0.5", "--seed", "3", "-q", "-j",
                 "4"})
                .code == 0);
    CHECK(digest_without_run_info(dir / "a") == digest_without_run_info(dir / "b"));
    CHECK(digest_without_run_info(dir / "a") == digest_without_run_info(dir / "c"));
    // Existing output is refused without --force.
    CHECK(run({"augment", "-i", src.string(), "-o", (dir / "a").string(), "-q"}).code == 2);
    CHECK(run({"augment", "-i", src.string(), "-o", (dir / "a").string(), "-q", "--force"}).code == 0);
}

TEST_CASE("flags override the config file") {
    pgt::test::TempDir dir("cli-config");
    std::ofstream(dir / "cfg.json") << R"({"mode": "gray", "count": 12, "seed": 77, "tasks_per_image": 2})";
    REQUIRE(run({"generate", "--config", (dir / "cfg.json").string(), "-o", (dir / "a").string(), "-n", "5", "-q",
                 "--no-images"})
                .code == 0);
    const auto cfg = nlohmann::json::parse(pgt::test::read_file(dir / "a" / "config.json"));
    CHECK(cfg["count"] == 5);
    CHECK(cfg["seed"] == 77);
    CHECK(cfg["tasks_per_image"] == 2);
    CHECK(pgt::test::load_manifest(dir / "a").size() == 5);

    // The config written next to a dataset reproduces it.
    REQUIRE(run({"generate", "--config", (dir / "a" / "config.json").string(), "-o", (dir / "b").string(), "-q",
                 "--no-images"})
                .code == 0);
    CHECK(pgt::test::read_file(dir / "a" / "manifest.json") == pgt::test::read_file(dir / "b" / "manifest.json"));

    std::ofstream(dir / "bad.json") << R"({"mode": "gray", "colour": 3})";
    CHECK(run({"generate", "--config", (dir / "bad.json").string(), "-o", (dir / "c").string()}).code == 2);
    std::ofstream(dir / "wrong.json") << R"({"mode": "overlay"})";
    CHECK(run({"generate", "--config", (dir / "wrong.json").string(), "-o", (dir / "c").string()}).code == 2);
}

TEST_CASE("separate mode through the cli") {
    pgt::test::TempDir dir("cli-separate");
    const auto src = pgt::test::make_source_dataset(dir.path(), {.rows = 10, .distinct_images = 3});
    const auto out = (dir / "s").string();
    REQUIRE(run({"separate", "-i", src.string(), "-o", out, "-n", "7", "-q"}).code == 0);
    CHECK(pgt::test::load_manifest(out).size() == 17);
    CHECK(run({"verify", out, "--source-root", dir.path().string()}).code == 0);
}

}  // TEST_SUITE
