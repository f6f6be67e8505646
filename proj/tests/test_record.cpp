// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "pgt/error.hpp"
#include "pgt/record.hpp"
#include "support.hpp"

using namespace pgt;

TEST_SUITE("record") {

TEST_CASE("overlay commands round-trip through JSON") {
    const OverlaySpec spec{BoxOutline{{{0.31, 0.42}, 0.2, 0.1}, ColorId::Green, 4},
                           FilledCircle{{0.1234567891234, 0.9}, 0.05, ColorId::Purple, 0.8},
                           Label{{0.1234567891234, 0.9}, 'Q', Ink::White, 3}};
    const auto j = overlay_to_json(spec);
    CHECK(overlay_from_json(j) == spec);
    CHECK(overlay_from_json(nlohmann::json::parse(j.dump())) == spec);
    CHECK(j[0]["type"] == "box");
    CHECK(j[1]["color"] == "purple");
    CHECK(j[2]["ink"] == "white");
}

TEST_CASE("malformed overlays are rejected") {
    CHECK_THROWS_AS(overlay_from_json(Json::object()), MalformedRecord);
    CHECK_THROWS_AS(overlay_from_json(Json::parse(R"([{"type":"star"}])")), MalformedRecord);
    CHECK_THROWS_AS(overlay_from_json(Json::parse(R"([{"type":"circle","color":"teal","center":[0.5,0.5],"radius":0.1,"alpha":0.5}])")),
                    MalformedRecord);
    CHECK_THROWS_AS(overlay_from_json(Json::parse(R"([{"type":"circle","color":"red","center":[0.5],"radius":0.1,"alpha":0.5}])")),
                    MalformedRecord);
    CHECK_THROWS_AS(overlay_from_json(Json::parse(R"([{"type":"label","glyph":"AB","ink":"black","center":[0.5,0.5],"scale":1}])")),
                    MalformedRecord);
}

TEST_CASE("manifest rows keep unknown fields and key order") {
    const auto row = Json::parse(R"({"zeta": 1, "id": "x", "image": "a.png", "meta": {"k": [1,2]},
        "conversations": [{"from": "human", "value": "<image>\nHi"}, {"from": "gpt", "value": "Yo"}]})");
    const auto s = sample_from_json(row);
    CHECK(s.id == "x");
    CHECK(s.image == "a.png");
    CHECK(s.conversations.size() == 2);
    CHECK(s.raw.dump() == row.dump());
    CHECK(s.raw.begin().key() == "zeta");
}

TEST_CASE("manifest validation") {
    const auto bad = [](const char* text) { return sample_from_json(Json::parse(text)); };
    CHECK_THROWS_AS(bad(R"({"image": "a.png", "conversations": []})"), MalformedRecord);
    CHECK_THROWS_AS(bad(R"({"id": "a", "image": "a.png"})"), MalformedRecord);
    CHECK_THROWS_AS(bad(R"({"id": "a", "conversations": [{"from": "gpt", "value": "x"}]})"), MalformedRecord);
    CHECK_THROWS_AS(bad(R"({"id": "a", "image": "a.png", "conversations": [{"from": "human", "value": "no token"}, {"from": "gpt", "value": "x"}]})"),
                    MalformedRecord);
    CHECK_THROWS_AS(bad(R"({"id": "a", "image": "a.png", "conversations": [{"from": "human", "value": "<image><image>"}, {"from": "gpt", "value": "x"}]})"),
                    MalformedRecord);
    CHECK_NOTHROW(bad(R"({"id": "a", "image": "a.png", "conversations": []})"));
    CHECK_NOTHROW(bad(R"({"id": "a", "conversations": [{"from": "human", "value": "text only"}, {"from": "gpt", "value": "ok"}]})"));
    CHECK_THROWS_AS(parse_manifest(Json::parse(R"([{"id": "a", "conversations": []}, {"id": "a", "conversations": []}])")),
                    MalformedRecord);
    CHECK_THROWS_AS(parse_manifest(Json::object()), MalformedRecord);
    CHECK(parse_manifest(Json::array()).empty());
}

TEST_CASE("file helpers") {
    pgt::test::TempDir dir("record");
    write_text_file(dir / "a.jsonl", "{\"a\": 1}\n\n{\"b\": 2}\n");
    const auto lines = read_jsonl(dir / "a.jsonl");
    REQUIRE(lines.size() == 2);
    CHECK(lines[1]["b"] == 2);
    CHECK_THROWS_AS(read_json_file(dir / "missing.json"), MissingFile);
    write_text_file(dir / "broken.json", "[1, 2");
    CHECK_THROWS_AS(read_json_file(dir / "broken.json"), MalformedRecord);
    CHECK(count_occurrences("<image> and <image>", "<image>") == 2);
}

}  // TEST_SUITE
