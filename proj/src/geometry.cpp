// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pgt/error.hpp"

namespace pgt {

namespace {

constexpr double kSlack = 1e-12;

struct PaletteEntry {
    ColorId id;
    std::string_view name;
    Rgb rgb;
};

constexpr std::array<PaletteEntry, 8> kPaletteTable{{
    {ColorId::Red, "red", {255, 0, 0}},
    {ColorId::Green, "green", {0, 255, 0}},
    {ColorId::Blue, "blue", {0, 0, 255}},
    {ColorId::Orange, "orange", {255, 165, 0}},
    {ColorId::Purple, "purple", {112, 48, 160}},
    {ColorId::Yellow, "yellow", {255, 255, 0}},
    {ColorId::Cyan, "cyan", {0, 255, 255}},
    {ColorId::Magenta, "magenta", {255, 0, 255}},
}};

}  // namespace

bool NormBox::valid() const {
    return width > 0.0 && height > 0.0 && std::isfinite(center.x) && std::isfinite(center.y) &&
           left() >= -kSlack && right() <= 1.0 + kSlack && top() >= -kSlack &&
           bottom() <= 1.0 + kSlack;
}

Relation opposite(Relation r) {
    switch (r) {
        case Relation::Left: return Relation::Right;
        case Relation::Right: return Relation::Left;
        case Relation::Above: return Relation::Below;
        case Relation::Below: return Relation::Above;
    }
    return r;
}

std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::Left: return "left";
        case Relation::Right: return "right";
        case Relation::Above: return "above";
        case Relation::Below: return "below";
    }
    return "?";
}

std::optional<Relation> relation_from_string(std::string_view word) {
    for (auto r : kAllRelations)
        if (to_string(r) == word) return r;
    return std::nullopt;
}

Rgb rgb_of(ColorId c) { return kPaletteTable[static_cast<std::size_t>(c)].rgb; }

std::string_view to_string(ColorId c) { return kPaletteTable[static_cast<std::size_t>(c)].name; }

std::optional<ColorId> color_from_string(std::string_view name) {
    for (const auto& e : kPaletteTable)
        if (e.name == name) return e.id;
    return std::nullopt;
}

MetricScale MetricScale::isotropic(int width, int height) {
    if (width <= 0 || height <= 0) throw ParameterError("isotropic metric needs positive dimensions");
    const double longest = std::max(width, height);
    return {width / longest, height / longest};
}

std::optional<Relation> relation_between(const NormBox& a, const NormBox& b, double margin) {
    if (!(margin > 0.0)) throw ParameterError("relation_between: margin must be > 0");
    const double dx = a.center.x - b.center.x;
    const double dy = a.center.y - b.center.y;
    const double adx = std::abs(dx);
    const double ady = std::abs(dy);
    if (adx == ady) return std::nullopt;
    if (adx > ady) {
        if (!(adx > margin) || !(adx > (a.width + b.width) / 2)) return std::nullopt;
        return dx < 0 ? Relation::Left : Relation::Right;
    }
    if (!(ady > margin) || !(ady > (a.height + b.height) / 2)) return std::nullopt;
    return dy < 0 ? Relation::Above : Relation::Below;
}

bool boxes_overlap(const NormBox& a, const NormBox& b) {
    return a.left() < b.right() && b.left() < a.right() && a.top() < b.bottom() &&
           b.top() < a.bottom();
}

NormBox sample_box(Rng& rng, SizeRange size_range) {
    if (!(size_range.min > 0.0) || !(size_range.min <= size_range.max) || !(size_range.max < 1.0)) {
        std::ostringstream msg;
        msg << "size_range must satisfy 0 < min <= max < 1, got (" << size_range.min << ", "
            << size_range.max << ")";
        throw ParameterError(msg.str());
    }
    NormBox box;
    box.width = rng.uniform(size_range.min, size_range.max);
    box.height = rng.uniform(size_range.min, size_range.max);
    box.center.x = rng.uniform(box.width / 2, 1.0 - box.width / 2);
    box.center.y = rng.uniform(box.height / 2, 1.0 - box.height / 2);
    return box;
}

BoxPair sample_unambiguous_box_pair(Rng& rng, SizeRange size_range, double margin, int max_attempts) {
    if (!(margin > 0.0)) throw ParameterError("margin must be > 0");
    if (max_attempts < 1) throw ParameterError("max_attempts must be >= 1");
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const NormBox a = sample_box(rng, size_range);
        const NormBox b = sample_box(rng, size_range);
        const auto rel = relation_between(a, b, margin);
        if (rel && !boxes_overlap(a, b)) return {a, b, *rel};
    }
    std::ostringstream msg;
    msg << "no unambiguous box pair after " << max_attempts << " attempts (size_range=("
        << size_range.min << ", " << size_range.max << "), margin=" << margin << ")";
    throw SamplingExhausted(msg.str());
}

double distance(NormPoint p, NormPoint q) { return std::hypot(p.x - q.x, p.y - q.y); }

std::size_t closest_index(NormPoint target, std::span<const NormPoint> candidates, double gap) {
    if (candidates.empty()) throw ParameterError("closest_index: no candidates");
    if (!(gap >= 0.0)) throw ParameterError("closest_index: gap must be >= 0");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    double second_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double d = distance(target, candidates[i]);
        if (d < best_d) {
            second_d = best_d;
            best_d = d;
            best = i;
        } else if (d < second_d) {
            second_d = d;
        }
    }
    if (candidates.size() > 1 && !(second_d - best_d >= gap && second_d > best_d)) {
        std::ostringstream msg;
        msg << "closest candidate is not unique: best " << best_d << ", runner-up " << second_d
            << ", required gap " << gap;
        throw AmbiguityError(msg.str());
    }
    return best;
}

std::vector<NormPoint> sample_labeled_points(Rng& rng, const LabeledPointParams& params) {
    if (params.n < 2) throw ParameterError("sample_labeled_points: n must be >= 2");
    if (params.max_attempts < 1) throw ParameterError("max_attempts must be >= 1");
    if (params.inset_x < 0 || params.inset_x >= 0.5 || params.inset_y < 0 || params.inset_y >= 0.5)
        throw ParameterError("sample_labeled_points: insets must be in [0, 0.5)");
    if (params.closest_gap && *params.closest_gap < 0)
        throw ParameterError("sample_labeled_points: closest_gap must be >= 0");

    const auto count = static_cast<std::size_t>(params.n);
    std::vector<NormPoint> points(count);
    std::vector<NormPoint> metric(count);
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        for (std::size_t i = 0; i < count; ++i) {
            points[i].x = rng.uniform(params.inset_x, 1.0 - params.inset_x);
            points[i].y = rng.uniform(params.inset_y, 1.0 - params.inset_y);
            metric[i] = params.metric.apply(points[i]);
        }
        bool separated = true;
        for (std::size_t i = 0; i < count && separated; ++i)
            for (std::size_t j = i + 1; j < count && separated; ++j)
                separated = distance(metric[i], metric[j]) >= params.min_separation;
        if (!separated) continue;
        if (params.closest_gap) {
            try {
                closest_index(metric.back(), std::span(metric).first(count - 1), *params.closest_gap);
            } catch (const AmbiguityError&) {
                continue;
            }
        }
        return points;
    }
    std::ostringstream msg;
    msg << "could not place " << params.n << " points with separation " << params.min_separation
        << " after " << params.max_attempts << " attempts";
    throw SamplingExhausted(msg.str());
}

}  // namespace pgt
