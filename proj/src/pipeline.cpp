// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>

#include "pgt/error.hpp"
#include "pgt/image_io.hpp"
#include "pgt/parallel.hpp"
#include "pgt/render.hpp"

namespace pgt {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPgtImageDir = "pgt_images";
constexpr std::string_view kGrayImageDir = "images";

Json truth_to_json(const GroundTruth& truth) {
    return std::visit(
        [](const auto& t) -> Json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, RelationTruth>) {
                return {{"a_color", to_string(t.a_color)},
                        {"b_color", to_string(t.b_color)},
                        {"relation", to_string(t.rel)}};
            } else if constexpr (std::is_same_v<T, CenterTruth>) {
                return {{"color", to_string(t.color)}, {"point", {t.point.x, t.point.y}}};
            } else if constexpr (std::is_same_v<T, CountTruth>) {
                Json distractors = Json::object();
                for (const auto& [c, n] : t.distractor_counts) distractors[std::string(to_string(c))] = n;
                return {{"target_color", to_string(t.target_color)},
                        {"count", t.count},
                        {"distractor_counts", distractors}};
            } else if constexpr (std::is_same_v<T, ClosestTruth>) {
                Json candidates = Json::array();
                for (char c : t.candidate_labels) candidates.push_back(std::string(1, c));
                return {{"target_label", std::string(1, t.target_label)},
                        {"candidate_labels", candidates},
                        {"answer_label", std::string(1, t.answer_label)}};
            } else {
                return {{"query_label", std::string(1, t.query_label)},
                        {"answer_label", std::string(1, t.answer_label)},
                        {"shared_color", to_string(t.shared_color)}};
            }
        },
        truth);
}

Json tolerances_to_json(const TaskInstance& inst) {
    Json out = Json::object();
    switch (inst.subtask) {
        case Subtask::RelativePositioning:
        case Subtask::CoordinateRegression: out["margin"] = inst.tolerances.margin; break;
        case Subtask::CountColor: out["disk_gap_px"] = inst.tolerances.disk_gap_px; break;
        case Subtask::ClosestPoint:
            out["min_separation"] = inst.tolerances.min_separation;
            out["closest_gap"] = inst.tolerances.closest_gap;
            out["disk_gap_px"] = inst.tolerances.disk_gap_px;
            break;
        case Subtask::ColorAnalogy:
            out["min_separation"] = inst.tolerances.min_separation;
            out["disk_gap_px"] = inst.tolerances.disk_gap_px;
            break;
    }
    return out;
}

Json pair_json(double a, double b) { return Json::array({a, b}); }
Json pair_json(int a, int b) { return Json::array({a, b}); }

void prepare_output(const PipelineConfig& config) {
    if (config.output.empty()) throw ConfigError("--output is required");
    std::error_code ec;
    if (fs::exists(config.output / "manifest.json", ec) && !config.force)
        throw ConfigError("output path collision: " + (config.output / "manifest.json").string() +
                          " already exists (pass --force to overwrite)");
    fs::create_directories(config.output, ec);
    if (ec) throw IoError("cannot create output directory " + config.output.string() + ": " + ec.message());
}

bool is_copyable_relative(const fs::path& p) {
    if (p.empty() || p.is_absolute()) return false;
    for (const auto& part : p)
        if (part == "..") return false;
    return true;
}

fs::path resolve_image_root(const PipelineConfig& config) {
    if (!config.image_root.empty()) return config.image_root;
    const auto parent = config.input.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

void copy_images(const std::set<std::string>& images, const fs::path& root, const fs::path& out,
                 RunReport& report) {
    for (const auto& image : images) {
        const fs::path rel(image);
        if (!is_copyable_relative(rel)) continue;
        const fs::path src = root / rel;
        const fs::path dst = out / rel;
        std::error_code ec;
        if (!fs::is_regular_file(src, ec)) {
            report.missing_images.push_back(image);
            continue;
        }
        if (fs::exists(dst, ec) && fs::equivalent(src, dst, ec)) continue;
        fs::create_directories(dst.parent_path(), ec);
        if (!fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec))
            throw IoError("cannot copy " + src.string() + " to " + dst.string() + ": " + ec.message());
        ++report.copied_images;
    }
}

void check_no_collision(const std::optional<std::string>& image) {
    if (!image) return;
    const fs::path rel(*image);
    if (!rel.empty() && *rel.begin() == kPgtImageDir)
        throw ConfigError("output path collision: input image '" + *image + "' lies under " +
                          std::string(kPgtImageDir) + "/, which is reserved for composited images");
}

/// Result of processing one output row.
struct RowOutcome {
    Json row;
    std::string sidecar_line;
    bool augmented = false;
    std::string failure;
    std::vector<std::string> families, subtasks, templates;
};

RowOutcome outcome_from(const Augmentation& aug) {
    RowOutcome out;
    out.row = aug.sample.raw;
    out.sidecar_line = aug.sidecar.json.dump();
    out.augmented = true;
    for (std::size_t i = 0; i < aug.instances.size(); ++i) {
        out.families.emplace_back(to_string(aug.instances[i].family));
        out.subtasks.emplace_back(to_string(aug.instances[i].subtask));
        out.templates.push_back(aug.qa[i].template_id);
    }
    return out;
}

void write_outputs(const PipelineConfig& config, const std::vector<RowOutcome>& rows, RunReport& report) {
    Json manifest = Json::array();
    std::string sidecar;
    for (const auto& r : rows) {
        manifest.push_back(r.row);
        if (r.augmented) {
            sidecar += r.sidecar_line;
            sidecar += '\n';
            ++report.augmented;
            for (const auto& f : r.families) ++report.families[f];
            for (const auto& s : r.subtasks) ++report.subtasks[s];
            for (const auto& t : r.templates) ++report.templates[t];
        } else {
            ++report.pass_through;
        }
    }
    report.output_samples = rows.size();
    write_text_file(config.output / "manifest.json", manifest.dump(2) + "\n");
    write_text_file(config.output / "sidecar.jsonl", sidecar);
    write_text_file(config.output / "config.json", config.to_json().dump(2) + "\n");
}

void finish(const PipelineConfig& config, RunReport& report, std::chrono::steady_clock::time_point start) {
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_file(config.output / "report.json", report.to_json().dump(2) + "\n");
}

std::string zero_padded(std::size_t value, std::size_t width) {
    auto s = std::to_string(value);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Overlay: return "overlay";
        case Mode::Separate: return "separate";
        case Mode::GrayStandalone: return "gray";
    }
    return "?";
}

std::optional<Mode> mode_from_string(std::string_view s) {
    for (auto m : {Mode::Overlay, Mode::Separate, Mode::GrayStandalone})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

void PipelineConfig::validate() const {
    require(tasks_per_image >= 1 && tasks_per_image <= 3,
            "tasks_per_image must be in [1,3], got " + std::to_string(tasks_per_image));
    require(proportion > 0.0 && proportion <= 1.0, "proportion must be in (0,1]");
    if (mode == Mode::GrayStandalone) require(count >= 1, "count must be >= 1");
    if (mode == Mode::Separate) require(extra >= 1, "extra must be >= 1");
    if (mode != Mode::GrayStandalone) require(!input.empty(), "input manifest is required");
    require(render.gray_width > 0 && render.gray_height > 0, "render.gray_width/gray_height must be > 0");
    require(render.gray_level >= 0 && render.gray_level <= 255, "render.gray_level must be in [0,255]");
    require(render.png_compression >= 0 && render.png_compression <= 9, "render.png_compression must be in [0,9]");
    require(workers >= 0, "workers must be >= 0");
    tasks.validate();
    require(tasks.distance.n_points == 4,
            "distance.n_points must be 4: the distance prompt names four circles");
    const auto registry = make_registry(*this);
    for (auto s : kAllSubtasks)
        require(!registry.eligible(s).empty(), "no enabled template for sub-task " + std::string(to_string(s)));
}

Json PipelineConfig::to_json() const {
    const auto& s = tasks.spatial;
    const auto& c = tasks.counting;
    const auto& d = tasks.distance;
    return Json{
        {"mode", to_string(mode)},
        {"seed", seed},
        {"proportion", proportion},
        {"tasks_per_image", tasks_per_image},
        {"count", count},
        {"extra", extra},
        {"input", input.string()},
        {"output", output.string()},
        {"image_root", image_root.string()},
        {"passthrough", passthrough == PassthroughImages::Copy ? "copy" : "reference"},
        {"write_images", write_images},
        {"workers", workers},
        {"render",
         {{"gray_width", render.gray_width},
          {"gray_height", render.gray_height},
          {"gray_level", render.gray_level},
          {"png_compression", render.png_compression}}},
        {"spatial",
         {{"size_range", pair_json(s.size_range.min, s.size_range.max)},
          {"margin", s.margin},
          {"max_attempts", s.max_attempts},
          {"stroke_px", s.stroke_px}}},
        {"counting",
         {{"count_range", pair_json(c.count_min, c.count_max)},
          {"distractor_color_count_range", pair_json(c.distractor_colors_min, c.distractor_colors_max)},
          {"radius_range", pair_json(c.radius_min, c.radius_max)},
          {"alpha", c.alpha},
          {"max_attempts", c.max_attempts},
          {"max_restarts", c.max_restarts}}},
        {"distance",
         {{"n_points", d.n_points},
          {"min_separation", d.min_separation},
          {"closest_gap", d.closest_gap},
          {"radius", d.radius},
          {"alpha", d.alpha},
          {"max_attempts", d.max_attempts}}},
        {"disk_gap_px", tasks.disk_gap_px},
        {"templates", templates},
    };
}

PipelineConfig PipelineConfig::from_json(const Json& j, PipelineConfig cfg) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto check_keys = [](const Json& obj, std::initializer_list<std::string_view> keys,
                               const std::string& where) {
        if (!obj.is_object()) throw ConfigError(where + " must be an object");
        for (const auto& [key, _] : obj.items())
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError("unknown config key '" + where + key + "'");
    };
    check_keys(j,
               {"mode", "seed", "proportion", "tasks_per_image", "count", "extra", "input", "output",
                "image_root", "passthrough", "write_images", "workers", "render", "spatial", "counting",
                "distance", "disk_gap_px", "templates"},
               "");
    try {
        const auto get = [&](const Json& obj, const char* key, auto& target) {
            if (obj.contains(key)) target = obj.at(key).get<std::decay_t<decltype(target)>>();
        };
        const auto get_range = [&](const Json& obj, const char* key, auto& lo, auto& hi) {
            if (!obj.contains(key)) return;
            const auto& v = obj.at(key);
            if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(key) + " must be [min, max]");
            lo = v[0].get<std::decay_t<decltype(lo)>>();
            hi = v[1].get<std::decay_t<decltype(hi)>>();
        };
        if (j.contains("mode")) {
            const auto m = mode_from_string(j.at("mode").get<std::string>());
            if (!m) throw ConfigError("mode must be overlay, separate or gray");
            cfg.mode = *m;
        }
        get(j, "seed", cfg.seed);
        get(j, "proportion", cfg.proportion);
        get(j, "tasks_per_image", cfg.tasks_per_image);
        get(j, "count", cfg.count);
        get(j, "extra", cfg.extra);
        if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
        if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
        if (j.contains("image_root")) cfg.image_root = j.at("image_root").get<std::string>();
        if (j.contains("passthrough")) {
            const auto p = j.at("passthrough").get<std::string>();
            if (p != "copy" && p != "reference") throw ConfigError("passthrough must be copy or reference");
            cfg.passthrough = p == "copy" ? PassthroughImages::Copy : PassthroughImages::Reference;
        }
        get(j, "write_images", cfg.write_images);
        get(j, "workers", cfg.workers);
        get(j, "disk_gap_px", cfg.tasks.disk_gap_px);
        if (j.contains("templates")) cfg.templates = j.at("templates");
        if (j.contains("render")) {
            const auto& r = j.at("render");
            check_keys(r, {"gray_width", "gray_height", "gray_level", "png_compression"}, "render.");
            get(r, "gray_width", cfg.render.gray_width);
            get(r, "gray_height", cfg.render.gray_height);
            get(r, "gray_level", cfg.render.gray_level);
            get(r, "png_compression", cfg.render.png_compression);
        }
        if (j.contains("spatial")) {
            const auto& s = j.at("spatial");
            check_keys(s, {"size_range", "margin", "max_attempts", "stroke_px"}, "spatial.");
            get_range(s, "size_range", cfg.tasks.spatial.size_range.min, cfg.tasks.spatial.size_range.max);
            get(s, "margin", cfg.tasks.spatial.margin);
            get(s, "max_attempts", cfg.tasks.spatial.max_attempts);
            get(s, "stroke_px", cfg.tasks.spatial.stroke_px);
        }
        if (j.contains("counting")) {
            const auto& c = j.at("counting");
            check_keys(c,
                       {"count_range", "distractor_color_count_range", "radius_range", "alpha",
                        "max_attempts", "max_restarts"},
                       "counting.");
            auto& cp = cfg.tasks.counting;
            get_range(c, "count_range", cp.count_min, cp.count_max);
            get_range(c, "distractor_color_count_range", cp.distractor_colors_min, cp.distractor_colors_max);
            get_range(c, "radius_range", cp.radius_min, cp.radius_max);
            get(c, "alpha", cp.alpha);
            get(c, "max_attempts", cp.max_attempts);
            get(c, "max_restarts", cp.max_restarts);
        }
        if (j.contains("distance")) {
            const auto& d = j.at("distance");
            check_keys(d, {"n_points", "min_separation", "closest_gap", "radius", "alpha", "max_attempts"},
                       "distance.");
            auto& dp = cfg.tasks.distance;
            get(d, "n_points", dp.n_points);
            get(d, "min_separation", dp.min_separation);
            get(d, "closest_gap", dp.closest_gap);
            get(d, "radius", dp.radius);
            get(d, "alpha", dp.alpha);
            get(d, "max_attempts", dp.max_attempts);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

PipelineConfig PipelineConfig::from_json(const Json& j) { return from_json(j, PipelineConfig{}); }

Rng derive_sample_rng(std::uint64_t global_seed, std::string_view sample_id) {
    return derive_rng(global_seed, sample_id);
}

TemplateRegistry make_registry(const PipelineConfig& config) {
    auto registry = TemplateRegistry::builtin();
    if (!config.templates.is_null() && !config.templates.empty())
        registry.apply_config(nlohmann::json::parse(config.templates.dump()));
    return registry;
}

Augmenter::Augmenter(PipelineConfig config, TemplateRegistry registry)
    : config_(std::move(config)), registry_(std::move(registry)) {
    config_.tasks.validate();
    if (config_.tasks_per_image < 1 || config_.tasks_per_image > 3)
        throw ConfigError("tasks_per_image must be in [1,3]");
    for (auto s : kAllSubtasks)
        if (registry_.eligible(s).empty())
            throw ConfigError("no enabled template for sub-task " + std::string(to_string(s)));
}

Augmentation Augmenter::augment(const DatasetSample& sample, const Canvas& canvas, Rng& rng,
                                const std::string& image_ref, const Json& base) const {
    const auto families = sample_distinct_families(rng, config_.tasks_per_image);
    TaskContext ctx{canvas.width(), canvas.height(), {}, {}};
    const InstantiateOptions inst_opts{config_.tasks.counting.count_min, config_.tasks.counting.count_max};

    std::vector<TaskInstance> instances;
    std::vector<QAPair> qas;
    std::vector<const PromptTemplate*> used;
    for (const auto family : families) {
        instances.push_back(generate_task(family, rng, config_.tasks, ctx));
        reserve_footprint(ctx, instances.back());
        const auto& tmpl = registry_.pick(instances.back().subtask, rng);
        used.push_back(&tmpl);
        qas.push_back(instantiate(tmpl, instances.back(), rng, inst_opts));
    }

    Canvas out = canvas;
    for (const auto& inst : instances) compose_into(out, inst.overlay);

    DatasetSample augmented = sample;
    Json conversations = sample.raw.contains("conversations") ? sample.raw.at("conversations") : Json::array();
    Json tasks_json = Json::array();
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const bool needs_token = augmented.conversations.empty();
        const std::string question =
            needs_token ? std::string(kImageToken) + "\n" + qas[i].question : qas[i].question;
        const auto turn = augmented.conversations.size();
        augmented.conversations.push_back({"human", question});
        augmented.conversations.push_back({"gpt", qas[i].answer});
        conversations.push_back(Json{{"from", "human"}, {"value", question}});
        conversations.push_back(Json{{"from", "gpt"}, {"value", qas[i].answer}});

        Json slots = Json::object();
        for (const auto& [k, v] : qas[i].slots) slots[k] = v;
        tasks_json.push_back(Json{
            {"family", to_string(instances[i].family)},
            {"subtask", to_string(instances[i].subtask)},
            {"template_id", qas[i].template_id},
            {"answer_kind", to_string(used[i]->kind)},
            {"answer_rule", to_string(used[i]->rule)},
            {"pattern", used[i]->pattern},
            {"slots", slots},
            {"options", qas[i].options},
            {"question", qas[i].question},
            {"answer", qas[i].answer},
            {"turn", turn},
            {"tolerances", tolerances_to_json(instances[i])},
            {"overlay", overlay_to_json(instances[i].overlay)},
            {"truth", truth_to_json(instances[i].truth)},
        });
    }
    augmented.image = image_ref;
    Json row = sample.raw.is_object() ? sample.raw : Json::object();
    if (!row.contains("id")) row["id"] = sample.id;
    row["image"] = image_ref;
    row["conversations"] = conversations;
    augmented.raw = row;

    SidecarRecord sidecar{sample.id,
                          Json{{"schema", kSidecarSchema},
                               {"id", sample.id},
                               {"image", image_ref},
                               {"seed", config_.seed},
                               {"seed_key", sample.id},
                               {"canvas", {{"width", canvas.width()}, {"height", canvas.height()}}},
                               {"base", base},
                               {"tasks", tasks_json}}};
    return {std::move(augmented), std::move(out), std::move(sidecar), std::move(instances), std::move(qas)};
}

Json RunReport::to_json() const {
    Json fails = Json::array();
    for (const auto& [id, reason] : failures) fails.push_back({{"id", id}, {"reason", reason}});
    const auto counts = [](const std::map<std::string, std::size_t>& m) {
        Json out = Json::object();
        for (const auto& [k, v] : m) out[k] = v;
        return out;
    };
    return Json{{"mode", mode},
                {"input_samples", input_samples},
                {"output_samples", output_samples},
                {"augmented", augmented},
                {"pass_through", pass_through},
                {"ineligible", ineligible},
                {"failures", fails},
                {"families", counts(families)},
                {"subtasks", counts(subtasks)},
                {"templates", counts(templates)},
                {"copied_images", copied_images},
                {"missing_images", missing_images},
                {"wall_time_s", wall_time_s}};
}

std::vector<std::string> select_for_augmentation(const std::vector<DatasetSample>& samples,
                                                 std::uint64_t seed, double proportion) {
    std::vector<std::pair<std::uint64_t, std::string>> ranked;
    for (const auto& s : samples)
        if (s.image) ranked.emplace_back(derive_rng(seed, "select:" + s.id).next(), s.id);
    std::sort(ranked.begin(), ranked.end());
    // The epsilon keeps products such as 0.29 * 100 from flooring one short.
    const auto target = static_cast<std::size_t>(
        std::floor(proportion * static_cast<double>(samples.size()) + 1e-9));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(target, ranked.size()); ++i) out.push_back(ranked[i].second);
    return out;
}

std::string image_file_stem(std::string_view sample_id) {
    std::string stem;
    bool changed = sample_id.empty();
    for (char c : sample_id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        stem.push_back(ok ? c : '_');
        changed = changed || !ok;
    }
    if (!stem.empty() && stem.front() == '.') {
        stem.front() = '_';
        changed = true;
    }
    if (changed) stem += "-" + sha256_hex(sample_id).substr(0, 12);
    return stem;
}

RunReport augment_dataset(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    const auto samples = parse_manifest(read_json_file(config.input));
    prepare_output(config);
    const Augmenter augmenter(config, make_registry(config));
    const fs::path root = resolve_image_root(config);

    const auto chosen = select_for_augmentation(samples, config.seed, config.proportion);
    const std::set<std::string> selected(chosen.begin(), chosen.end());

    RunReport report;
    report.mode = std::string(to_string(config.mode));
    report.input_samples = samples.size();
    std::set<std::string> stems;
    for (const auto& s : samples) {
        if (!s.image) ++report.ineligible;
        if (!selected.contains(s.id)) check_no_collision(s.image);
        if (selected.contains(s.id) && !stems.insert(image_file_stem(s.id)).second)
            throw ConfigError("output path collision: two sample ids map to image " + image_file_stem(s.id));
    }
    if (config.write_images) fs::create_directories(config.output / kPgtImageDir);

    std::vector<RowOutcome> rows(samples.size());
    parallel_for(samples.size(), config.workers, [&](std::size_t i) {
        const auto& sample = samples[i];
        auto& out = rows[i];
        out.row = sample.raw;
        if (!selected.contains(sample.id)) return;
        try {
            const Canvas canvas = load_image(root / *sample.image);
            Rng rng = derive_sample_rng(config.seed, sample.id);
            const std::string image_ref = std::string(kPgtImageDir) + "/" + image_file_stem(sample.id) + ".png";
            const auto aug =
                augmenter.augment(sample, canvas, rng, image_ref, Json{{"kind", "image"}, {"source", *sample.image}});
            if (config.write_images)
                save_image(aug.canvas, config.output / image_ref, config.render.png_compression);
            out = outcome_from(aug);
        } catch (const IoError& e) {
            out.failure = std::string("unresolvable image: ") + e.what();
        } catch (const SamplingExhausted& e) {
            out.failure = std::string("sampling exhausted: ") + e.what();
        }
    });

    std::set<std::string> passthrough_images;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!rows[i].failure.empty()) {
            report.failures.emplace_back(samples[i].id, rows[i].failure);
            std::cerr << "pgtgen: sample '" << samples[i].id << "' passed through: " << rows[i].failure << "\n";
        }
        if (!rows[i].augmented && samples[i].image) passthrough_images.insert(*samples[i].image);
    }
    write_outputs(config, rows, report);
    if (config.passthrough == PassthroughImages::Copy) copy_images(passthrough_images, root, config.output, report);
    finish(config, report, start);
    return report;
}

RunReport generate_gray_dataset(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    prepare_output(config);
    const Augmenter augmenter(config, make_registry(config));
    const auto n = static_cast<std::size_t>(config.count);
    const std::size_t width = std::max<std::size_t>(6, std::to_string(n - 1).size());
    const auto level = static_cast<std::uint8_t>(config.render.gray_level);
    const Canvas base = gray_canvas(config.render.gray_width, config.render.gray_height, level);
    if (config.write_images) fs::create_directories(config.output / kGrayImageDir);

    RunReport report;
    report.mode = std::string(to_string(config.mode));
    std::vector<RowOutcome> rows(n);
    parallel_for(n, config.workers, [&](std::size_t i) {
        DatasetSample sample;
        sample.id = zero_padded(i, width);
        sample.raw = Json{{"id", sample.id}, {"image", ""}, {"conversations", Json::array()}};
        const std::string image_ref = std::string(kGrayImageDir) + "/" + sample.id + ".png";
        Rng rng = derive_sample_rng(config.seed, sample.id);
        Augmentation aug = [&] {
            try {
                return augmenter.augment(sample, base, rng, image_ref, Json{{"kind", "gray"}, {"level", level}});
            } catch (const SamplingExhausted& e) {
                throw SamplingExhausted("sample " + sample.id + ": " + e.what());
            }
        }();
        if (config.write_images) save_image(aug.canvas, config.output / image_ref, config.render.png_compression);
        rows[i] = outcome_from(aug);
    });
    write_outputs(config, rows, report);
    finish(config, report, start);
    return report;
}

RunReport generate_separate(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    const auto samples = parse_manifest(read_json_file(config.input));
    prepare_output(config);
    const Augmenter augmenter(config, make_registry(config));
    const fs::path root = resolve_image_root(config);

    std::vector<std::size_t> sources;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ids.insert(samples[i].id);
        check_no_collision(samples[i].image);
        if (samples[i].image) sources.push_back(i);
    }
    if (sources.empty()) throw ConfigError("separate mode needs at least one input sample with an image");

    RunReport report;
    report.mode = std::string(to_string(config.mode));
    report.input_samples = samples.size();
    const auto n_extra = static_cast<std::size_t>(config.extra);
    const std::size_t width = std::max<std::size_t>(6, std::to_string(n_extra - 1).size());
    std::vector<std::string> synthetic_ids(n_extra);
    for (std::size_t k = 0; k < n_extra; ++k) {
        synthetic_ids[k] = "pgt_sep_" + zero_padded(k, width);
        if (ids.contains(synthetic_ids[k]))
            throw ConfigError("output path collision: input already has a sample with id '" + synthetic_ids[k] + "'");
    }
    if (config.write_images) fs::create_directories(config.output / kPgtImageDir);

    std::vector<RowOutcome> rows(samples.size() + n_extra);
    for (std::size_t i = 0; i < samples.size(); ++i) rows[i].row = samples[i].raw;
    parallel_for(n_extra, config.workers, [&](std::size_t k) {
        constexpr int kMaxDraws = 16;
        const std::string& id = synthetic_ids[k];
        Rng rng = derive_sample_rng(config.seed, id);
        std::string last_error;
        for (int draw = 0; draw < kMaxDraws; ++draw) {
            const auto& source = samples[sources[rng.below(sources.size())]];
            try {
                const Canvas canvas = load_image(root / *source.image);
                DatasetSample sample;
                sample.id = id;
                sample.raw = Json{{"id", id}, {"image", ""}, {"conversations", Json::array()}};
                const std::string image_ref = std::string(kPgtImageDir) + "/" + image_file_stem(id) + ".png";
                const auto aug = augmenter.augment(
                    sample, canvas, rng, image_ref,
                    Json{{"kind", "image"}, {"source", *source.image}, {"source_id", source.id}});
                if (config.write_images)
                    save_image(aug.canvas, config.output / image_ref, config.render.png_compression);
                rows[samples.size() + k] = outcome_from(aug);
                return;
            } catch (const IoError& e) {
                last_error = e.what();
            } catch (const SamplingExhausted& e) {
                last_error = e.what();
            }
        }
        throw Error("synthetic sample " + id + " failed after " + std::to_string(kMaxDraws) +
                    " source draws: " + last_error);
    });

    std::set<std::string> originals;
    for (const auto& s : samples)
        if (s.image) originals.insert(*s.image);
    write_outputs(config, rows, report);
    if (config.passthrough == PassthroughImages::Copy) copy_images(originals, root, config.output, report);
    finish(config, report, start);
    return report;
}

RunReport run_pipeline(const PipelineConfig& config) {
    switch (config.mode) {
        case Mode::Overlay: return augment_dataset(config);
        case Mode::Separate: return generate_separate(config);
        case Mode::GrayStandalone: return generate_gray_dataset(config);
    }
    throw ContractError("unknown mode");
}

}  // namespace pgt
