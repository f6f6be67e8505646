// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

#include "pgt/error.hpp"
#include "pgt/image_io.hpp"
#include "pgt/parallel.hpp"

namespace pgt {

namespace {

using PlainJson = nlohmann::json;

const PlainJson& field(const PlainJson& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw MalformedRecord(where + ": missing '" + key + "'");
    return j.at(key);
}

std::string str_field(const PlainJson& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_string()) throw MalformedRecord(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

double num_field(const PlainJson& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number()) throw MalformedRecord(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

int int_field(const PlainJson& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number_integer()) throw MalformedRecord(where + ": '" + key + "' must be an integer");
    return v.get<int>();
}

std::string letter(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

std::string coordinates_text(NormPoint p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.2f, %.2f)", p.x, p.y);
    return buf;
}

std::string_view family_of_subtask(std::string_view subtask) {
    if (subtask == "relative_positioning" || subtask == "coordinate_regression") return "spatial_relation";
    if (subtask == "count_color") return "counting";
    if (subtask == "closest_point" || subtask == "color_analogy") return "distance_analogy";
    return "";
}

/// Slot substitution for "[name]" placeholders, written independently of the
/// template engine.
std::string fill_pattern(const std::string& pattern, const PlainJson& slots) {
    std::string out;
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        const auto open = pattern.find('[', pos);
        if (open == std::string::npos) break;
        const auto close = pattern.find(']', open);
        if (close == std::string::npos) break;
        out.append(pattern, pos, open - pos);
        const auto name = pattern.substr(open + 1, close - open - 1);
        if (!slots.is_object() || !slots.contains(name) || !slots.at(name).is_string())
            throw MalformedRecord("slot '" + name + "' missing");
        out += slots.at(name).get<std::string>();
        pos = close + 1;
    }
    out.append(pattern, pos, std::string::npos);
    return out;
}

struct Shapes {
    std::vector<BoxOutline> boxes;
    std::vector<FilledCircle> circles;
    std::vector<Label> labels;
};

Shapes split(const OverlaySpec& spec) {
    Shapes s;
    for (const auto& c : spec) {
        if (const auto* b = std::get_if<BoxOutline>(&c)) s.boxes.push_back(*b);
        else if (const auto* f = std::get_if<FilledCircle>(&c)) s.circles.push_back(*f);
        else s.labels.push_back(std::get<Label>(c));
    }
    return s;
}

ColorId slot_color(const PlainJson& slots, const char* name) {
    const auto v = str_field(slots, name, "slots");
    const auto c = color_from_string(v);
    if (!c) throw MalformedRecord("slot '" + std::string(name) + "' is not a palette colour: " + v);
    return *c;
}

const NormBox& box_of(const Shapes& s, ColorId color) {
    const NormBox* found = nullptr;
    for (const auto& b : s.boxes)
        if (b.color == color) {
            if (found) throw MalformedRecord("two " + std::string(to_string(color)) + " boxes");
            found = &b.box;
        }
    if (!found) throw MalformedRecord("no " + std::string(to_string(color)) + " box");
    return *found;
}

std::vector<std::string> string_list(const PlainJson& j, const std::string& where) {
    if (!j.is_array()) throw MalformedRecord(where + " must be an array");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw MalformedRecord(where + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void require_options_match_slots(const std::vector<std::string>& options, const PlainJson& slots,
                                 const std::vector<std::string>& slot_names) {
    if (options.size() != slot_names.size())
        throw MalformedRecord("expected " + std::to_string(slot_names.size()) + " options, found " +
                              std::to_string(options.size()));
    for (std::size_t i = 0; i < options.size(); ++i)
        if (str_field(slots, slot_names[i].c_str(), "slots") != options[i])
            throw MalformedRecord("option " + letter(i) + " differs from slot " + slot_names[i]);
}

double pixel_gap(const FilledCircle& a, const FilledCircle& b, int w, int h) {
    const double m = std::min(w, h);
    const double d = std::hypot((a.center.x - b.center.x) * w, (a.center.y - b.center.y) * h);
    return d - (a.radius + b.radius) * m;
}

void require_clearance(const std::vector<FilledCircle>& circles, int w, int h, int gap_px) {
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j)
            if (pixel_gap(circles[i], circles[j], w, h) < gap_px)
                throw AmbiguityError("circles " + std::to_string(i) + " and " + std::to_string(j) +
                                     " are closer than " + std::to_string(gap_px) + " px");
}

struct LabeledCircle {
    char label;
    FilledCircle circle;
};

std::vector<LabeledCircle> labeled_circles(const Shapes& s) {
    std::vector<LabeledCircle> out;
    std::set<char> seen;
    for (const auto& l : s.labels) {
        const FilledCircle* match = nullptr;
        for (const auto& c : s.circles)
            if (c.center == l.center) match = &c;
        if (!match) throw MalformedRecord(std::string("label ") + l.glyph + " is not on a circle");
        if (!seen.insert(l.glyph).second) throw MalformedRecord(std::string("label ") + l.glyph + " used twice");
        out.push_back({l.glyph, *match});
    }
    if (out.size() != s.circles.size()) throw MalformedRecord("every circle needs exactly one label");
    return out;
}

const LabeledCircle& find_label(const std::vector<LabeledCircle>& lc, const std::string& label) {
    for (const auto& c : lc)
        if (label.size() == 1 && c.label == label[0]) return c;
    throw MalformedRecord("no circle labelled '" + label + "'");
}

void require_separation(const std::vector<LabeledCircle>& lc, MetricScale metric, double min_sep) {
    for (std::size_t i = 0; i < lc.size(); ++i)
        for (std::size_t j = i + 1; j < lc.size(); ++j)
            if (distance(metric.apply(lc[i].circle.center), metric.apply(lc[j].circle.center)) < min_sep)
                throw AmbiguityError(std::string("points ") + lc[i].label + " and " + lc[j].label +
                                     " are closer than the minimum separation");
}

Rederived rederive_spatial(const std::string& subtask, const std::string& rule, const Shapes& s,
                           const PlainJson& slots, const std::vector<std::string>& options,
                           const PlainJson& tol) {
    if (s.boxes.size() != 2 || !s.circles.empty() || !s.labels.empty())
        throw MalformedRecord("spatial overlay must hold exactly two boxes");
    const double margin = num_field(tol, "margin", "tolerances");
    Rederived out;
    if (subtask == "coordinate_regression") {
        if (rule != "coordinates") throw MalformedRecord("answer_rule " + rule + " invalid for " + subtask);
        if (!relation_between(s.boxes[0].box, s.boxes[1].box, margin))
            throw AmbiguityError("box pair has no unambiguous relation");
        const auto color = slot_color(slots, "color");
        const auto& box = box_of(s, color);
        out.answer = coordinates_text(box.center);
        out.truth = {{"color", to_string(color)}, {"point", {box.center.x, box.center.y}}};
        return out;
    }
    const auto ca = slot_color(slots, "color_A");
    const auto cb = slot_color(slots, "color_B");
    if (ca == cb) throw MalformedRecord("color_A equals color_B");
    const auto rel = relation_between(box_of(s, ca), box_of(s, cb), margin);
    if (!rel) throw AmbiguityError("boxes do not determine a relation at margin " + std::to_string(margin));
    const std::string word(to_string(*rel));
    out.truth = {{"a_color", to_string(ca)}, {"b_color", to_string(cb)}, {"relation", word}};
    if (rule == "relation_word") {
        if (!options.empty()) {
            require_options_match_slots(options, slots, {"rel_A", "rel_B"});
            if (std::find(options.begin(), options.end(), word) == options.end())
                throw MalformedRecord("no option is the true relation '" + word + "'");
        }
        out.answer = word;
    } else if (rule == "true_false") {
        if (!options.empty()) throw MalformedRecord("true/false questions carry no options");
        const auto stated = relation_from_string(str_field(slots, "rel_A", "slots"));
        if (!stated) throw MalformedRecord("slot rel_A is not a relation");
        out.answer = *stated == *rel ? "True" : "False";
    } else {
        throw MalformedRecord("answer_rule " + rule + " invalid for " + subtask);
    }
    return out;
}

Rederived rederive_counting(const std::string& rule, const Shapes& s, const PlainJson& slots,
                            const std::vector<std::string>& options, const PlainJson& tol, int w, int h) {
    if (!s.boxes.empty() || !s.labels.empty()) throw MalformedRecord("counting overlay holds only circles");
    require_clearance(s.circles, w, h, int_field(tol, "disk_gap_px", "tolerances"));
    const auto target = slot_color(slots, "color");
    std::map<ColorId, int> tally;
    for (const auto& c : s.circles) ++tally[c.color];
    const int count = tally[target];
    PlainJson distractors = PlainJson::object();
    for (const auto& [c, n] : tally)
        if (c != target && n > 0) distractors[std::string(to_string(c))] = n;
    Rederived out;
    out.truth = {{"target_color", to_string(target)}, {"count", count}, {"distractor_counts", distractors}};
    const auto count_text = std::to_string(count);
    if (rule == "numeral") {
        if (!options.empty()) throw MalformedRecord("free-form counting carries no options");
        out.answer = count_text;
    } else if (rule == "option_letter") {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < options.size(); ++i) names.push_back("option_" + letter(i));
        require_options_match_slots(options, slots, names);
        if (std::set<std::string>(options.begin(), options.end()).size() != options.size())
            throw AmbiguityError("counting options repeat a value");
        const auto it = std::find(options.begin(), options.end(), count_text);
        if (it == options.end()) throw MalformedRecord("no option equals the count " + count_text);
        out.answer = letter(static_cast<std::size_t>(it - options.begin()));
    } else {
        throw MalformedRecord("answer_rule " + rule + " invalid for count_color");
    }
    return out;
}

Rederived rederive_distance(const std::string& subtask, const std::string& rule, const Shapes& s,
                            const PlainJson& slots, const std::vector<std::string>& options,
                            const PlainJson& tol, int w, int h) {
    if (!s.boxes.empty()) throw MalformedRecord("distance overlay holds no boxes");
    if (rule != "label_letter") throw MalformedRecord("answer_rule " + rule + " invalid for " + subtask);
    const auto lc = labeled_circles(s);
    const auto metric = MetricScale::isotropic(w, h);
    require_separation(lc, metric, num_field(tol, "min_separation", "tolerances"));
    require_clearance(s.circles, w, h, int_field(tol, "disk_gap_px", "tolerances"));
    const auto query = str_field(slots, "target_letter", "slots");
    const auto& q = find_label(lc, query);
    Rederived out;
    if (subtask == "closest_point") {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < options.size(); ++i) names.push_back("option_" + letter(i));
        require_options_match_slots(options, slots, names);
        if (options.size() + 1 != lc.size()) throw MalformedRecord("options must list every other circle");
        std::vector<NormPoint> candidates;
        PlainJson labels = PlainJson::array();
        for (const auto& o : options) {
            const auto& c = find_label(lc, o);
            if (c.label == q.label) throw MalformedRecord("the query point is listed as an option");
            candidates.push_back(metric.apply(c.circle.center));
            labels.push_back(o);
        }
        if (std::set<std::string>(options.begin(), options.end()).size() != options.size())
            throw MalformedRecord("options repeat a label");
        const auto best = closest_index(metric.apply(q.circle.center), candidates,
                                        num_field(tol, "closest_gap", "tolerances"));
        out.answer = options[best];
        out.truth = {{"target_label", query}, {"candidate_labels", labels}, {"answer_label", out.answer}};
        return out;
    }
    if (!options.empty()) throw MalformedRecord("colour analogy carries no options");
    const LabeledCircle* match = nullptr;
    for (const auto& c : lc) {
        if (c.label == q.label || c.circle.color != q.circle.color) continue;
        if (match) throw AmbiguityError("several circles share the query colour");
        match = &c;
    }
    if (!match) throw AmbiguityError("no other circle shares the query colour");
    out.answer = std::string(1, match->label);
    out.truth = {{"query_label", query}, {"answer_label", out.answer}, {"shared_color", to_string(q.circle.color)}};
    return out;
}

}  // namespace

Rederived rederive(const PlainJson& task, int width, int height) {
    if (width <= 0 || height <= 0) throw MalformedRecord("canvas size must be positive");
    const auto subtask = str_field(task, "subtask", "task");
    const auto rule = str_field(task, "answer_rule", "task");
    const auto& slots = field(task, "slots", "task");
    const auto options = string_list(field(task, "options", "task"), "options");
    const auto& tol = field(task, "tolerances", "task");
    const auto shapes = split(overlay_from_json(field(task, "overlay", "task")));
    if (subtask == "relative_positioning" || subtask == "coordinate_regression")
        return rederive_spatial(subtask, rule, shapes, slots, options, tol);
    if (subtask == "count_color") return rederive_counting(rule, shapes, slots, options, tol, width, height);
    if (subtask == "closest_point" || subtask == "color_analogy")
        return rederive_distance(subtask, rule, shapes, slots, options, tol, width, height);
    throw MalformedRecord("unknown subtask '" + subtask + "'");
}

std::string rederive_answer(const PlainJson& task, int width, int height) {
    return rederive(task, width, height).answer;
}

std::size_t count_components(const std::vector<std::uint8_t>& mask, int width, int height) {
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (mask.size() != n) throw ContractError("mask size does not match width * height");
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> stack;
    std::size_t components = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (!mask[start] || seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const auto p = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(p % static_cast<std::size_t>(width));
            const int y = static_cast<int>(p / static_cast<std::size_t>(width));
            const auto visit = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) return;
                const auto q = static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(nx);
                if (mask[q] && !seen[q]) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            };
            visit(x - 1, y);
            visit(x + 1, y);
            visit(x, y - 1);
            visit(x, y + 1);
        }
    }
    return components;
}

std::map<ColorId, int> pixel_count_oracle(const OverlaySpec& spec, int width, int height) {
    std::map<ColorId, int> counts;
    for (auto c : kPalette) counts[c] = 0;
    const auto raster = rasterize_overlay_only(spec, width, height);
    // Over black, each circle colour lands on one exact value.
    std::map<ColorId, Rgb> blended;
    for (const auto& command : spec)
        if (const auto* c = std::get_if<FilledCircle>(&command)) {
            const Rgb src = rgb_of(c->color);
            blended[c->color] = {blend_pixel(0, src.r, c->alpha), blend_pixel(0, src.g, c->alpha),
                                 blend_pixel(0, src.b, c->alpha)};
        }
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const auto pixels = raster.canvas.pixels();
    for (const auto& [color, value] : blended) {
        std::vector<std::uint8_t> mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (raster.coverage[i] < 0) continue;
            if (pixels[3 * i] == value.r && pixels[3 * i + 1] == value.g && pixels[3 * i + 2] == value.b)
                mask[i] = 1;
        }
        counts[color] = static_cast<int>(count_components(mask, width, height));
    }
    return counts;
}

void DistributionSummary::add(const DistributionSummary& o) {
    samples += o.samples;
    turns += o.turns;
    for (const auto& [k, v] : o.families) families[k] += v;
    for (const auto& [k, v] : o.subtasks) subtasks[k] += v;
    for (const auto& [k, v] : o.templates) templates[k] += v;
    for (const auto& [f, m] : o.answers)
        for (const auto& [k, v] : m) answers[f][k] += v;
    for (const auto& [k, v] : o.tasks_per_sample) tasks_per_sample[k] += v;
}

nlohmann::ordered_json DistributionSummary::to_json() const {
    using OJ = nlohmann::ordered_json;
    const auto counts = [](const std::map<std::string, std::size_t>& m) {
        OJ out = OJ::object();
        for (const auto& [k, v] : m) out[k] = v;
        return out;
    };
    OJ answer_json = OJ::object();
    for (const auto& [f, m] : answers) answer_json[f] = counts(m);
    OJ per_sample = OJ::object();
    for (const auto& [k, v] : tasks_per_sample) per_sample[std::to_string(k)] = v;
    return OJ{{"samples", samples},
              {"turns", turns},
              {"families", counts(families)},
              {"subtasks", counts(subtasks)},
              {"templates", counts(templates)},
              {"answers", answer_json},
              {"tasks_per_sample", per_sample}};
}

namespace {

std::string safe_string(const PlainJson& j, const char* key) {
    if (j.is_object() && j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
    return "";
}

DistributionSummary summarize_record(const PlainJson& record) {
    DistributionSummary s;
    s.samples = 1;
    if (!record.is_object() || !record.contains("tasks") || !record.at("tasks").is_array()) return s;
    const auto& tasks = record.at("tasks");
    s.tasks_per_sample[tasks.size()] = 1;
    for (const auto& t : tasks) {
        ++s.turns;
        const auto subtask = safe_string(t, "subtask");
        ++s.families[safe_string(t, "family")];
        ++s.subtasks[subtask];
        ++s.templates[safe_string(t, "template_id")];
        auto& answers = s.answers[subtask];
        const auto answer = safe_string(t, "answer");
        const auto rule = safe_string(t, "answer_rule");
        std::vector<std::string> options;
        if (t.contains("options") && t.at("options").is_array())
            for (const auto& o : t.at("options"))
                if (o.is_string()) options.push_back(o.get<std::string>());
        const auto it = std::find(options.begin(), options.end(), answer);
        const bool positional = it != options.end() && (rule == "relation_word" || rule == "label_letter");
        if (positional) ++answers["position:" + letter(static_cast<std::size_t>(it - options.begin()))];
        const PlainJson truth = t.contains("truth") ? t.at("truth") : PlainJson::object();
        if (subtask == "relative_positioning") ++answers["relation:" + safe_string(truth, "relation")];
        if (rule == "true_false") ++answers["tf:" + answer];
        if (rule == "option_letter") ++answers["letter:" + answer];
        if (subtask == "count_color" && truth.contains("count") && truth.at("count").is_number_integer())
            ++answers["count:" + std::to_string(truth.at("count").get<int>())];
        if (subtask == "color_analogy" || subtask == "closest_point") ++answers["label:" + answer];
    }
    return s;
}

struct Partial {
    std::size_t turns = 0;
    std::size_t matched = 0;
    std::vector<Mismatch> mismatches;
    std::vector<Violation> ambiguity, alpha, pixel, record;
};

struct Check {
    std::string field, expected, found;
};

void compare(std::vector<Check>& out, const std::string& field, const std::string& expected,
             const std::string& found) {
    if (expected != found) out.push_back({field, expected, found});
}

Canvas expected_render(const PlainJson& base, const OverlaySpec& overlay, int w, int h,
                       const VerifyOptions& options, bool& exact) {
    const auto kind = str_field(base, "kind", "base");
    exact = true;
    if (kind == "gray") {
        const int level = int_field(base, "level", "base");
        if (level < 0 || level > 255) throw MalformedRecord("base level out of range");
        return compose(gray_canvas(w, h, static_cast<std::uint8_t>(level)), overlay);
    }
    if (kind != "image") throw MalformedRecord("unknown base kind '" + kind + "'");
    if (!options.source_root.empty()) {
        const Canvas source = load_image(options.source_root / str_field(base, "source", "base"));
        if (source.width() != w || source.height() != h)
            throw MalformedRecord("source image size differs from the recorded canvas");
        return compose(source, overlay);
    }
    exact = false;
    return rasterize_overlay_only(overlay, w, h).canvas;
}

void check_pixels(const std::string& id, const PlainJson& record, const std::string& image,
                  const OverlaySpec& overlay, int w, int h, const VerifyOptions& options, Partial& p) {
    Canvas actual(1, 1, {});
    try {
        actual = load_image(options.dataset_dir / image);
    } catch (const IoError& e) {
        p.pixel.push_back({id, -1, std::string("cannot load image: ") + e.what()});
        return;
    }
    if (actual.width() != w || actual.height() != h) {
        p.pixel.push_back({id, -1, "image is " + std::to_string(actual.width()) + "x" +
                                       std::to_string(actual.height()) + ", canvas records " +
                                       std::to_string(w) + "x" + std::to_string(h)});
        return;
    }
    bool exact = true;
    Canvas expected = actual;
    std::vector<std::int32_t> coverage;
    try {
        expected = expected_render(field(record, "base", "record"), overlay, w, h, options, exact);
        if (!exact) coverage = rasterize_overlay_only(overlay, w, h).coverage;
    } catch (const Error& e) {
        p.pixel.push_back({id, -1, std::string("cannot re-render: ") + e.what()});
        return;
    }
    const auto a = actual.pixels();
    const auto e = expected.pixels();
    std::size_t differing = 0;
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    for (std::size_t i = 0; i < n; ++i) {
        if (!exact) {
            if (coverage[i] < 0) continue;
            if (std::holds_alternative<FilledCircle>(overlay[static_cast<std::size_t>(coverage[i])])) continue;
        }
        if (a[3 * i] != e[3 * i] || a[3 * i + 1] != e[3 * i + 1] || a[3 * i + 2] != e[3 * i + 2]) ++differing;
    }
    if (differing > 0)
        p.pixel.push_back({id, -1, std::to_string(differing) + (exact ? " pixels differ from the re-render"
                                                                      : " opaque overlay pixels differ")});
}

void verify_record(const PlainJson& record, const DatasetSample& sample, const VerifyOptions& options,
                   Partial& p) {
    const std::string& id = sample.id;
    const auto record_issue = [&](const std::string& what) { p.record.push_back({id, -1, what}); };

    if (safe_string(record, "schema") != kSidecarSchema) record_issue("schema is not " + std::string(kSidecarSchema));
    if (safe_string(record, "seed_key") != id) record_issue("seed_key differs from the sample id");
    const auto image = safe_string(record, "image");
    if (!sample.image || *sample.image != image) record_issue("sidecar image differs from the manifest image");
    if (!record.contains("seed") || !record.at("seed").is_number_unsigned()) record_issue("seed must be an unsigned integer");

    int w = 0, h = 0;
    try {
        const auto& canvas = field(record, "canvas", "record");
        w = int_field(canvas, "width", "canvas");
        h = int_field(canvas, "height", "canvas");
    } catch (const MalformedRecord& e) {
        record_issue(e.what());
    }
    const PlainJson empty = PlainJson::array();
    const PlainJson& tasks =
        record.contains("tasks") && record.at("tasks").is_array() ? record.at("tasks") : empty;
    if (tasks.empty()) record_issue("record holds no tasks");

    const auto& conv = sample.conversations;
    std::vector<OverlaySpec> overlays(tasks.size());
    std::vector<std::vector<FilledCircle>> circles(tasks.size());

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& task = tasks[i];
        std::vector<Check> checks;
        int turn = -1;
        if (task.contains("turn") && task.at("turn").is_number_integer()) turn = task.at("turn").get<int>();
        ++p.turns;

        // PGT turns are the last question/answer pairs of the conversation, in order.
        const int expected_turn = static_cast<int>(conv.size()) - 2 * static_cast<int>(tasks.size() - i);
        compare(checks, "turn", std::to_string(expected_turn), std::to_string(turn));
        const bool turn_ok = turn >= 0 && turn % 2 == 0 && static_cast<std::size_t>(turn) + 1 < conv.size();

        try {
            overlays[i] = overlay_from_json(field(task, "overlay", "task"));
            for (const auto& c : overlays[i])
                if (const auto* f = std::get_if<FilledCircle>(&c)) {
                    circles[i].push_back(*f);
                    if (!(f->alpha > 0.0 && f->alpha < 1.0)) {
                        p.alpha.push_back({id, turn, "circle alpha " + std::to_string(f->alpha) + " is not in (0,1)"});
                        checks.push_back({"alpha", "(0,1)", std::to_string(f->alpha)});
                    }
                }
        } catch (const MalformedRecord& e) {
            checks.push_back({"overlay", "well-formed overlay", e.what()});
        }

        const auto subtask = safe_string(task, "subtask");
        const auto answer = safe_string(task, "answer");
        const auto question = safe_string(task, "question");
        const auto template_id = safe_string(task, "template_id");
        std::optional<Rederived> rd;
        try {
            rd = rederive(task, w, h);
        } catch (const AmbiguityError& e) {
            p.ambiguity.push_back({id, turn, e.what()});
            checks.push_back({"ambiguity", "unique answer", e.what()});
        } catch (const Error& e) {
            checks.push_back({"record", "well-formed task", e.what()});
        } catch (const nlohmann::json::exception& e) {
            checks.push_back({"record", "well-formed task", e.what()});
        }

        if (rd) {
            compare(checks, "answer", rd->answer, turn_ok ? conv[static_cast<std::size_t>(turn) + 1].value : "");
            compare(checks, "sidecar.answer", rd->answer, answer);
            const PlainJson recorded_truth = task.contains("truth") ? task.at("truth") : PlainJson();
            if (recorded_truth != rd->truth) checks.push_back({"truth", rd->truth.dump(), recorded_truth.dump()});
            if (subtask == "count_color" && options.check_pixels) {
                const int tallied = rd->truth.at("count").get<int>();
                const auto target = color_from_string(rd->truth.at("target_color").get<std::string>());
                int counted = -1;
                try {
                    counted = pixel_count_oracle(overlays[i], w, h).at(*target);
                } catch (const Error& e) {
                    p.pixel.push_back({id, turn, std::string("cannot rasterize overlay: ") + e.what()});
                }
                if (counted != tallied) {
                    p.pixel.push_back({id, turn, "pixel oracle counts " + std::to_string(counted) +
                                                     " components, overlay holds " + std::to_string(tallied)});
                    checks.push_back({"pixel_count", std::to_string(tallied), std::to_string(counted)});
                }
            }
        }

        if (turn_ok) {
            const std::string prefix = std::string(kImageToken) + "\n";
            const auto& human = conv[static_cast<std::size_t>(turn)].value;
            compare(checks, "question", turn == 0 ? prefix + question : question, human);
        }
        try {
            const auto pattern = str_field(task, "pattern", "task");
            compare(checks, "question", fill_pattern(pattern, field(task, "slots", "task")), question);
            if (!options.known_patterns.empty()) {
                const auto it = options.known_patterns.find(template_id);
                if (it == options.known_patterns.end())
                    checks.push_back({"template_id", "a known template", template_id});
                else
                    compare(checks, "pattern", it->second, pattern);
            }
        } catch (const Error& e) {
            checks.push_back({"pattern", "fillable pattern", e.what()});
        }
        compare(checks, "family", std::string(family_of_subtask(subtask)), safe_string(task, "family"));
        const auto rule = safe_string(task, "answer_rule");
        const bool has_options = task.contains("options") && task.at("options").is_array() && !task.at("options").empty();
        const std::string kind = rule == "true_false" ? "true_false" : has_options ? "multiple_choice" : "free_form";
        compare(checks, "answer_kind", kind, safe_string(task, "answer_kind"));

        if (checks.empty()) {
            ++p.matched;
        } else {
            Mismatch m{id, turn, template_id, checks[0].field, checks[0].expected, checks[0].found, {}};
            for (const auto& c : checks)
                m.details.push_back(c.field + ": expected " + c.expected + ", found " + c.found);
            p.mismatches.push_back(std::move(m));
        }
    }

    // Tasks sharing an image keep their circle colours and footprints apart.
    for (std::size_t i = 0; i < tasks.size(); ++i)
        for (std::size_t j = i + 1; j < tasks.size(); ++j) {
            for (const auto& a : circles[i])
                for (const auto& b : circles[j]) {
                    if (a.color == b.color)
                        p.ambiguity.push_back({id, -1, "tasks " + std::to_string(i) + " and " + std::to_string(j) +
                                                           " both draw " + std::string(to_string(a.color)) + " circles"});
                    else if (pixel_gap(a, b, w, h) < 0)
                        p.ambiguity.push_back({id, -1, "circles of tasks " + std::to_string(i) + " and " +
                                                           std::to_string(j) + " overlap"});
                }
        }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (safe_string(tasks[i], "subtask") != "count_color") continue;
        const auto target = color_from_string(safe_string(tasks[i].value("slots", PlainJson::object()), "color"));
        for (std::size_t j = 0; j < tasks.size(); ++j)
            if (j != i && target)
                for (const auto& c : circles[j])
                    if (c.color == *target)
                        p.ambiguity.push_back({id, -1, "counted colour " + std::string(to_string(*target)) +
                                                           " also appears in task " + std::to_string(j)});
    }

    if (options.check_pixels && !options.dataset_dir.empty() && w > 0 && h > 0 && !image.empty()) {
        OverlaySpec full;
        for (const auto& o : overlays) full.insert(full.end(), o.begin(), o.end());
        check_pixels(id, record, image, full, w, h, options, p);
    }
}

nlohmann::ordered_json violations_json(const std::vector<Violation>& v) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& x : v) out.push_back({{"id", x.id}, {"turn", x.turn}, {"detail", x.detail}});
    return out;
}

}  // namespace

DistributionSummary summarize(const std::vector<PlainJson>& sidecar) {
    DistributionSummary total;
    for (const auto& r : sidecar) total.add(summarize_record(r));
    return total;
}

bool VerifyReport::ok() const {
    return mismatches.empty() && ambiguity_violations.empty() && alpha_violations.empty() &&
           pixel_violations.empty() && record_violations.empty();
}

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json mm = nlohmann::ordered_json::array();
    for (const auto& m : mismatches)
        mm.push_back({{"id", m.id},
                      {"turn", m.turn},
                      {"template_id", m.template_id},
                      {"field", m.field},
                      {"expected", m.expected},
                      {"found", m.found},
                      {"details", m.details}});
    return {{"ok", ok()},
            {"samples_checked", samples_checked},
            {"turns_checked", turns_checked},
            {"answers_matched", answers_matched},
            {"mismatches", mm},
            {"ambiguity_violations", violations_json(ambiguity_violations)},
            {"alpha_violations", violations_json(alpha_violations)},
            {"pixel_violations", violations_json(pixel_violations)},
            {"record_violations", violations_json(record_violations)},
            {"distributions", distributions.to_json()}};
}

VerifyReport verify_dataset(const Json& manifest, const std::vector<PlainJson>& sidecar,
                            const VerifyOptions& options) {
    const auto samples = parse_manifest(manifest);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < samples.size(); ++i) index[samples[i].id] = i;

    std::vector<std::size_t> row_of(sidecar.size());
    std::set<std::string> seen;
    for (std::size_t k = 0; k < sidecar.size(); ++k) {
        const auto id = safe_string(sidecar[k], "id");
        const auto it = index.find(id);
        if (it == index.end()) throw MalformedRecord("sidecar record '" + id + "' has no manifest row");
        if (!seen.insert(id).second) throw MalformedRecord("sidecar record '" + id + "' appears twice");
        row_of[k] = it->second;
    }

    std::vector<Partial> partials(sidecar.size());
    parallel_for(sidecar.size(), options.workers,
                 [&](std::size_t k) { verify_record(sidecar[k], samples[row_of[k]], options, partials[k]); });

    VerifyReport report;
    report.samples_checked = sidecar.size();
    for (auto& p : partials) {
        report.turns_checked += p.turns;
        report.answers_matched += p.matched;
        std::move(p.mismatches.begin(), p.mismatches.end(), std::back_inserter(report.mismatches));
        std::move(p.ambiguity.begin(), p.ambiguity.end(), std::back_inserter(report.ambiguity_violations));
        std::move(p.alpha.begin(), p.alpha.end(), std::back_inserter(report.alpha_violations));
        std::move(p.pixel.begin(), p.pixel.end(), std::back_inserter(report.pixel_violations));
        std::move(p.record.begin(), p.record.end(), std::back_inserter(report.record_violations));
    }
    std::stable_sort(report.mismatches.begin(), report.mismatches.end(), [](const Mismatch& a, const Mismatch& b) {
        return std::tie(a.id, a.turn) < std::tie(b.id, b.turn);
    });
    report.distributions = summarize(sidecar);
    return report;
}

VerifyReport verify_directory(const std::filesystem::path& dir, VerifyOptions options) {
    if (options.dataset_dir.empty()) options.dataset_dir = dir;
    const auto manifest = read_json_file(dir / "manifest.json");
    std::vector<PlainJson> sidecar;
    for (const auto& line : read_jsonl(dir / "sidecar.jsonl")) sidecar.push_back(PlainJson::parse(line.dump()));
    return verify_dataset(manifest, sidecar, options);
}

}  // namespace pgt
