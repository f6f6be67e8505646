// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/record.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pgt/error.hpp"

namespace pgt {

namespace {

template <typename JsonT>
const JsonT& field(const JsonT& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw MalformedRecord(where + ": missing field '" + key + "'");
    return obj.at(key);
}

template <typename JsonT>
double number(const JsonT& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number()) throw MalformedRecord(where + ": field '" + key + "' must be a number");
    return v.template get<double>();
}

template <typename JsonT>
int integer(const JsonT& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number_integer()) throw MalformedRecord(where + ": field '" + key + "' must be an integer");
    return v.template get<int>();
}

template <typename JsonT>
std::string string(const JsonT& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw MalformedRecord(where + ": field '" + key + "' must be a string");
    return v.template get<std::string>();
}

template <typename JsonT>
NormPoint point(const JsonT& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw MalformedRecord(where + ": field '" + key + "' must be [x, y]");
    return {v[0].template get<double>(), v[1].template get<double>()};
}

template <typename JsonT>
ColorId color(const JsonT& obj, const std::string& where) {
    const auto name = string(obj, "color", where);
    const auto c = color_from_string(name);
    if (!c) throw MalformedRecord(where + ": unknown colour '" + name + "'");
    return *c;
}

}  // namespace

Json overlay_to_json(const OverlaySpec& spec) {
    Json out = Json::array();
    for (const auto& command : spec) {
        if (const auto* box = std::get_if<BoxOutline>(&command)) {
            out.push_back({{"type", "box"},
                           {"color", to_string(box->color)},
                           {"center", {box->box.center.x, box->box.center.y}},
                           {"width", box->box.width},
                           {"height", box->box.height},
                           {"stroke", box->stroke}});
        } else if (const auto* circle = std::get_if<FilledCircle>(&command)) {
            out.push_back({{"type", "circle"},
                           {"color", to_string(circle->color)},
                           {"center", {circle->center.x, circle->center.y}},
                           {"radius", circle->radius},
                           {"alpha", circle->alpha}});
        } else if (const auto* label = std::get_if<Label>(&command)) {
            out.push_back({{"type", "label"},
                           {"glyph", std::string(1, label->glyph)},
                           {"ink", to_string(label->ink)},
                           {"center", {label->center.x, label->center.y}},
                           {"scale", label->scale}});
        }
    }
    return out;
}

template <typename JsonT>
OverlaySpec overlay_from_json(const JsonT& commands) {
    if (!commands.is_array()) throw MalformedRecord("overlay must be an array");
    OverlaySpec spec;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto& c = commands[i];
        const std::string where = "overlay[" + std::to_string(i) + "]";
        const auto type = string(c, "type", where);
        if (type == "box") {
            BoxOutline box;
            box.color = color(c, where);
            box.box.center = point(c, "center", where);
            box.box.width = number(c, "width", where);
            box.box.height = number(c, "height", where);
            box.stroke = integer(c, "stroke", where);
            spec.emplace_back(box);
        } else if (type == "circle") {
            FilledCircle circle;
            circle.color = color(c, where);
            circle.center = point(c, "center", where);
            circle.radius = number(c, "radius", where);
            circle.alpha = number(c, "alpha", where);
            spec.emplace_back(circle);
        } else if (type == "label") {
            Label label;
            const auto glyph = string(c, "glyph", where);
            if (glyph.size() != 1) throw MalformedRecord(where + ": glyph must be one character");
            label.glyph = glyph[0];
            const auto ink = ink_from_string(string(c, "ink", where));
            if (!ink) throw MalformedRecord(where + ": ink must be black or white");
            label.ink = *ink;
            label.center = point(c, "center", where);
            label.scale = integer(c, "scale", where);
            spec.emplace_back(label);
        } else {
            throw MalformedRecord(where + ": unknown command type '" + type + "'");
        }
    }
    return spec;
}

template OverlaySpec overlay_from_json<Json>(const Json&);
template OverlaySpec overlay_from_json<nlohmann::json>(const nlohmann::json&);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++n;
    return n;
}

DatasetSample sample_from_json(const Json& row) {
    if (!row.is_object()) throw MalformedRecord("manifest row is not an object");
    if (!row.contains("id") || !row.at("id").is_string())
        throw MalformedRecord("manifest row without a string 'id'");
    DatasetSample sample;
    sample.id = row.at("id").get<std::string>();
    const std::string where = "sample '" + sample.id + "'";
    if (row.contains("image")) {
        if (!row.at("image").is_string()) throw MalformedRecord(where + ": 'image' must be a string");
        sample.image = row.at("image").get<std::string>();
    }
    const auto& conv = field(row, "conversations", where);
    if (!conv.is_array()) throw MalformedRecord(where + ": 'conversations' must be an array");
    for (std::size_t i = 0; i < conv.size(); ++i) {
        const auto& t = conv[i];
        const std::string turn_where = where + " turn " + std::to_string(i);
        Turn turn{string(t, "from", turn_where), string(t, "value", turn_where)};
        const char* expected = i % 2 == 0 ? "human" : "gpt";
        if (turn.from != expected)
            throw MalformedRecord(turn_where + ": expected role '" + expected + "', got '" + turn.from + "'");
        sample.conversations.push_back(std::move(turn));
    }
    if (sample.image && !sample.conversations.empty() &&
        count_occurrences(sample.conversations.front().value, kImageToken) != 1)
        throw MalformedRecord(where + ": first human turn must contain exactly one <image> token");
    sample.raw = row;
    return sample;
}

std::vector<DatasetSample> parse_manifest(const Json& manifest) {
    if (!manifest.is_array()) throw MalformedRecord("manifest must be a JSON array");
    std::vector<DatasetSample> samples;
    samples.reserve(manifest.size());
    std::set<std::string> seen;
    for (const auto& row : manifest) {
        samples.push_back(sample_from_json(row));
        if (!seen.insert(samples.back().id).second)
            throw MalformedRecord("duplicate sample id '" + samples.back().id + "'");
    }
    return samples;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedRecord(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open " + path.string());
    std::vector<Json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(Json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedRecord(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace pgt
