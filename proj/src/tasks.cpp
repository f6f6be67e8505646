// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pgt/error.hpp"

namespace pgt {

namespace {

struct SubtaskName {
    Subtask subtask;
    TaskFamily family;
    std::string_view name;
};

constexpr std::array<SubtaskName, 5> kSubtaskNames{{
    {Subtask::RelativePositioning, TaskFamily::SpatialRelation, "relative_positioning"},
    {Subtask::CoordinateRegression, TaskFamily::SpatialRelation, "coordinate_regression"},
    {Subtask::CountColor, TaskFamily::Counting, "count_color"},
    {Subtask::ClosestPoint, TaskFamily::DistanceAnalogy, "closest_point"},
    {Subtask::ColorAnalogy, TaskFamily::DistanceAnalogy, "color_analogy"},
}};

std::vector<ColorId> available_colors(const TaskContext& ctx) {
    std::vector<ColorId> colors;
    for (auto c : kPalette)
        if (std::find(ctx.reserved_colors.begin(), ctx.reserved_colors.end(), c) ==
            ctx.reserved_colors.end())
            colors.push_back(c);
    return colors;
}

ColorId take_color(Rng& rng, std::vector<ColorId>& pool) {
    const auto i = static_cast<std::size_t>(rng.below(pool.size()));
    const ColorId c = pool[i];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    return c;
}

int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

bool clear_of(const PixelDisk& d, const std::vector<PixelDisk>& others, int gap_px) {
    for (const auto& o : others)
        if (std::hypot(d.cx - o.cx, d.cy - o.cy) < d.r + o.r + gap_px) return false;
    return true;
}

PixelDisk to_pixels(const FilledCircle& c, const TaskContext& ctx) {
    return {c.center.x * ctx.width, c.center.y * ctx.height,
            c.radius * std::min(ctx.width, ctx.height)};
}

// Label ink for a disk of this colour, judged over a mid-gray background.
Ink ink_for(ColorId color, double alpha) {
    const Rgb c = rgb_of(color);
    return contrasting_ink(
        {blend_pixel(128, c.r, alpha), blend_pixel(128, c.g, alpha), blend_pixel(128, c.b, alpha)});
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

TaskFamily family_of(Subtask s) { return kSubtaskNames[static_cast<std::size_t>(s)].family; }

std::string_view to_string(TaskFamily f) {
    switch (f) {
        case TaskFamily::SpatialRelation: return "spatial_relation";
        case TaskFamily::Counting: return "counting";
        case TaskFamily::DistanceAnalogy: return "distance_analogy";
    }
    return "?";
}

std::string_view to_string(Subtask s) { return kSubtaskNames[static_cast<std::size_t>(s)].name; }

std::optional<TaskFamily> family_from_string(std::string_view name) {
    for (auto f : kAllFamilies)
        if (to_string(f) == name) return f;
    return std::nullopt;
}

std::optional<Subtask> subtask_from_string(std::string_view name) {
    for (const auto& e : kSubtaskNames)
        if (e.name == name) return e.subtask;
    return std::nullopt;
}

void TaskParams::validate() const {
    const auto& s = spatial;
    require(s.size_range.min > 0 && s.size_range.min <= s.size_range.max && s.size_range.max < 1,
            "spatial.size_range must satisfy 0 < min <= max < 1");
    require(s.margin > 0 && s.margin < 1, "spatial.margin must be in (0,1)");
    require(s.max_attempts >= 1, "spatial.max_attempts must be >= 1");
    require(s.stroke_px >= 0, "spatial.stroke_px must be >= 0");

    const auto& c = counting;
    require(c.count_min >= 0 && c.count_min <= c.count_max, "counting.count_range must satisfy 0 <= min <= max");
    require(c.count_max - c.count_min + 1 >= 3,
            "counting.count_range must hold at least 3 values (multiple-choice decoys)");
    require(c.count_max <= 20, "counting.count_range max must be <= 20");
    require(c.distractor_colors_min >= 0 && c.distractor_colors_min <= c.distractor_colors_max,
            "counting.distractor_color_count_range must satisfy 0 <= min <= max");
    require(c.distractor_colors_max <= 3, "counting.distractor_color_count_range max must be <= 3");
    require(c.radius_min > 0 && c.radius_min <= c.radius_max && c.radius_max < 0.25,
            "counting.radius_range must satisfy 0 < min <= max < 0.25");
    require(c.alpha > 0 && c.alpha < 1, "counting.alpha must be in (0,1) (semi-transparent)");
    require(c.max_attempts >= 1 && c.max_restarts >= 1, "counting attempt limits must be >= 1");

    const auto& d = distance;
    require(d.n_points >= 3 && d.n_points <= 26, "distance.n_points must be in [3,26]");
    require(d.min_separation > 0, "distance.min_separation must be > 0");
    require(d.closest_gap >= 0, "distance.closest_gap must be >= 0");
    require(d.radius > 0 && d.radius < 0.25, "distance.radius must be in (0,0.25)");
    require(d.min_separation > 2 * d.radius, "distance.min_separation must exceed twice distance.radius");
    require(d.alpha > 0 && d.alpha < 1, "distance.alpha must be in (0,1) (semi-transparent)");
    require(d.max_attempts >= 1, "distance.max_attempts must be >= 1");

    require(disk_gap_px >= 1, "disk_gap_px must be >= 1");
}

TaskFamily sample_family(Rng& rng) { return kAllFamilies[rng.below(kAllFamilies.size())]; }

std::vector<TaskFamily> sample_distinct_families(Rng& rng, int k) {
    if (k < 1 || k > static_cast<int>(kAllFamilies.size()))
        throw ParameterError("number of distinct families must be in [1,3]");
    std::vector<TaskFamily> pool(kAllFamilies.begin(), kAllFamilies.end());
    std::vector<TaskFamily> out;
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rng.below(pool.size()));
        out.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
}

TaskInstance gen_spatial(Rng& rng, const SpatialParams& params, const TaskContext& ctx) {
    const Subtask subtask =
        rng.below(2) == 0 ? Subtask::RelativePositioning : Subtask::CoordinateRegression;
    const BoxPair pair =
        sample_unambiguous_box_pair(rng, params.size_range, params.margin, params.max_attempts);
    const int stroke = params.stroke_px > 0
                           ? params.stroke_px
                           : std::max(2, static_cast<int>(std::lround(0.01 * std::min(ctx.width, ctx.height))));

    TaskInstance inst{TaskFamily::SpatialRelation, subtask, {}, {}, {}};
    inst.overlay.push_back(BoxOutline{pair.a, ColorId::Green, stroke});
    inst.overlay.push_back(BoxOutline{pair.b, ColorId::Red, stroke});
    inst.tolerances.margin = params.margin;
    if (subtask == Subtask::RelativePositioning) {
        inst.truth = RelationTruth{ColorId::Green, ColorId::Red, pair.relation};
    } else if (rng.below(2) == 0) {
        inst.truth = CenterTruth{ColorId::Green, pair.a.center};
    } else {
        inst.truth = CenterTruth{ColorId::Red, pair.b.center};
    }
    return inst;
}

TaskInstance gen_counting(Rng& rng, const CountingParams& params, int disk_gap_px,
                          const TaskContext& ctx) {
    const int min_dim = std::min(ctx.width, ctx.height);
    if (params.radius_min * min_dim < 2.0)
        throw SamplingExhausted("canvas too small for counting circles (" + std::to_string(ctx.width) +
                                "x" + std::to_string(ctx.height) + ")");

    auto pool = available_colors(ctx);
    if (pool.size() < static_cast<std::size_t>(1 + params.distractor_colors_min))
        throw SamplingExhausted("not enough free palette colours for a counting task");
    const ColorId target = take_color(rng, pool);
    const int n_distractors =
        std::min(uniform_int(rng, params.distractor_colors_min, params.distractor_colors_max),
                 static_cast<int>(pool.size()));

    CountTruth truth{target, uniform_int(rng, params.count_min, params.count_max), {}};
    std::vector<ColorId> circle_colors(static_cast<std::size_t>(truth.count), target);
    for (int i = 0; i < n_distractors; ++i) {
        const ColorId c = take_color(rng, pool);
        const int n = uniform_int(rng, params.count_min, params.count_max);
        truth.distractor_counts[c] = n;
        circle_colors.insert(circle_colors.end(), static_cast<std::size_t>(n), c);
    }
    rng.shuffle(circle_colors);

    for (int restart = 0; restart < params.max_restarts; ++restart) {
        std::vector<PixelDisk> placed = ctx.occupied;
        OverlaySpec overlay;
        bool ok = true;
        for (const ColorId color : circle_colors) {
            bool found = false;
            for (int attempt = 0; attempt < params.max_attempts && !found; ++attempt) {
                FilledCircle circle;
                circle.color = color;
                circle.alpha = params.alpha;
                circle.radius = rng.uniform(params.radius_min, params.radius_max);
                const double rx = circle.radius * min_dim / ctx.width;
                const double ry = circle.radius * min_dim / ctx.height;
                circle.center = {rng.uniform(rx, 1.0 - rx), rng.uniform(ry, 1.0 - ry)};
                const PixelDisk disk = to_pixels(circle, ctx);
                if (clear_of(disk, placed, disk_gap_px)) {
                    placed.push_back(disk);
                    overlay.push_back(circle);
                    found = true;
                }
            }
            if (!found) {
                ok = false;
                break;
            }
        }
        if (ok) {
            TaskInstance inst{TaskFamily::Counting, Subtask::CountColor, std::move(overlay), truth, {}};
            inst.tolerances.disk_gap_px = disk_gap_px;
            return inst;
        }
    }
    throw SamplingExhausted("could not place " + std::to_string(circle_colors.size()) +
                            " non-overlapping circles");
}

TaskInstance gen_distance_analogy(Rng& rng, const DistanceParams& params, int disk_gap_px,
                                  const TaskContext& ctx) {
    const Subtask subtask = rng.below(2) == 0 ? Subtask::ClosestPoint : Subtask::ColorAnalogy;
    const int min_dim = std::min(ctx.width, ctx.height);
    const auto n = static_cast<std::size_t>(params.n_points);
    const double radius_px = params.radius * min_dim;
    if (radius_px < 4.5)
        throw SamplingExhausted("canvas too small for labeled circles (" + std::to_string(ctx.width) +
                                "x" + std::to_string(ctx.height) + ")");

    LabeledPointParams lp;
    lp.n = params.n_points;
    lp.min_separation = params.min_separation;
    lp.closest_gap = subtask == Subtask::ClosestPoint ? std::optional<double>(params.closest_gap)
                                                      : std::nullopt;
    lp.max_attempts = params.max_attempts;
    lp.inset_x = radius_px / ctx.width;
    lp.inset_y = radius_px / ctx.height;
    lp.metric = MetricScale::isotropic(ctx.width, ctx.height);

    auto pool = available_colors(ctx);
    const std::size_t colors_needed = subtask == Subtask::ClosestPoint ? n : n - 1;
    if (pool.size() < colors_needed)
        throw SamplingExhausted("not enough free palette colours for a labeled-point task");

    std::vector<NormPoint> points;
    for (int attempt = 0;; ++attempt) {
        if (attempt == params.max_attempts)
            throw SamplingExhausted("labeled points keep colliding with earlier overlays");
        points = sample_labeled_points(rng, lp);
        bool clear = true;
        for (const auto& p : points)
            clear = clear && clear_of({p.x * ctx.width, p.y * ctx.height, radius_px}, ctx.occupied,
                                      disk_gap_px);
        if (clear) break;
    }

    std::vector<ColorId> colors(n);
    TaskInstance inst{TaskFamily::DistanceAnalogy, subtask, {}, {}, {}};
    inst.tolerances.min_separation = params.min_separation;
    inst.tolerances.disk_gap_px = disk_gap_px;
    if (subtask == Subtask::ClosestPoint) {
        for (auto& c : colors) c = take_color(rng, pool);
        std::vector<NormPoint> metric_points;
        for (const auto& p : points) metric_points.push_back(lp.metric.apply(p));
        const auto winner = closest_index(metric_points.back(),
                                          std::span(metric_points).first(n - 1), params.closest_gap);
        ClosestTruth truth{static_cast<char>('A' + n - 1), {}, static_cast<char>('A' + winner)};
        for (std::size_t i = 0; i + 1 < n; ++i) truth.candidate_labels.push_back(static_cast<char>('A' + i));
        inst.truth = truth;
        inst.tolerances.closest_gap = params.closest_gap;
    } else {
        // Pick the one same-coloured pair among the n*(n-1)/2 index pairs.
        auto pair_index = rng.below(n * (n - 1) / 2);
        std::size_t first = 0;
        std::size_t second = 1;
        for (std::size_t i = 0, k = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++k)
                if (k == pair_index) {
                    first = i;
                    second = j;
                }
        const ColorId shared = take_color(rng, pool);
        for (std::size_t i = 0; i < n; ++i)
            colors[i] = (i == first || i == second) ? shared : take_color(rng, pool);
        const bool query_first = rng.below(2) == 0;
        const std::size_t query = query_first ? first : second;
        const std::size_t answer = query_first ? second : first;
        inst.truth = AnalogyTruth{static_cast<char>('A' + query), static_cast<char>('A' + answer), shared};
    }

    const int scale = std::max(1, static_cast<int>(radius_px / 4.5));
    for (std::size_t i = 0; i < n; ++i) {
        inst.overlay.push_back(FilledCircle{points[i], params.radius, colors[i], params.alpha});
        inst.overlay.push_back(
            Label{points[i], static_cast<char>('A' + i), ink_for(colors[i], params.alpha), scale});
    }
    return inst;
}

TaskInstance generate_task(TaskFamily family, Rng& rng, const TaskParams& params,
                           const TaskContext& ctx) {
    switch (family) {
        case TaskFamily::SpatialRelation: return gen_spatial(rng, params.spatial, ctx);
        case TaskFamily::Counting: return gen_counting(rng, params.counting, params.disk_gap_px, ctx);
        case TaskFamily::DistanceAnalogy:
            return gen_distance_analogy(rng, params.distance, params.disk_gap_px, ctx);
    }
    throw ContractError("unknown task family");
}

void reserve_footprint(TaskContext& ctx, const TaskInstance& instance) {
    for (const auto& command : instance.overlay) {
        if (const auto* circle = std::get_if<FilledCircle>(&command)) {
            if (std::find(ctx.reserved_colors.begin(), ctx.reserved_colors.end(), circle->color) ==
                ctx.reserved_colors.end())
                ctx.reserved_colors.push_back(circle->color);
            ctx.occupied.push_back(to_pixels(*circle, ctx));
        }
    }
    if (const auto* count = std::get_if<CountTruth>(&instance.truth)) {
        // A target colour with zero circles must still stay exclusive.
        if (std::find(ctx.reserved_colors.begin(), ctx.reserved_colors.end(), count->target_color) ==
            ctx.reserved_colors.end())
            ctx.reserved_colors.push_back(count->target_color);
    }
}

}  // namespace pgt
