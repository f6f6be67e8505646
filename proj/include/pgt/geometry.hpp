// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgt/rng.hpp"

namespace pgt {

// Normalized coordinates: x is a fraction of canvas width, y a fraction of
// canvas height. The origin is the top-left corner and y grows downward, so
// "above" means a smaller y.

struct NormPoint {
    double x = 0.0;
    double y = 0.0;

    bool valid() const { return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0; }
    friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

struct NormBox {
    NormPoint center;
    double width = 0.0;
    double height = 0.0;

    double left() const { return center.x - width / 2; }
    double right() const { return center.x + width / 2; }
    double top() const { return center.y - height / 2; }
    double bottom() const { return center.y + height / 2; }

    /// Positive extent and fully inside the unit square (up to 1e-12 rounding slack).
    bool valid() const;
    friend bool operator==(const NormBox&, const NormBox&) = default;
};

enum class Relation : std::uint8_t { Left, Right, Above, Below };

inline constexpr std::array<Relation, 4> kAllRelations{Relation::Left, Relation::Right,
                                                       Relation::Above, Relation::Below};

Relation opposite(Relation r);
std::string_view to_string(Relation r);
std::optional<Relation> relation_from_string(std::string_view word);

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// The fixed overlay palette. Box tasks only use Green and Red.
enum class ColorId : std::uint8_t { Red, Green, Blue, Orange, Purple, Yellow, Cyan, Magenta };

inline constexpr std::array<ColorId, 8> kPalette{ColorId::Red,    ColorId::Green,  ColorId::Blue,
                                                 ColorId::Orange, ColorId::Purple, ColorId::Yellow,
                                                 ColorId::Cyan,   ColorId::Magenta};

/// red (255,0,0), green (0,255,0), blue (0,0,255), orange (255,165,0),
/// purple (112,48,160), yellow (255,255,0), cyan (0,255,255), magenta (255,0,255).
Rgb rgb_of(ColorId c);
std::string_view to_string(ColorId c);
std::optional<ColorId> color_from_string(std::string_view name);

struct SizeRange {
    double min = 0.08;
    double max = 0.25;
};

/// Per-axis weights applied before measuring distances. `isotropic(w, h)`
/// makes normalized distances proportional to pixel distances on a w x h canvas.
struct MetricScale {
    double sx = 1.0;
    double sy = 1.0;

    static MetricScale isotropic(int width, int height);
    NormPoint apply(NormPoint p) const { return {p.x * sx, p.y * sy}; }
};

/// Relation of `a` with respect to `b` along the dominant axis of the center
/// offset. Empty when the axes tie, when the separation does not exceed
/// `margin`, or when the boxes' projections on that axis overlap or touch.
std::optional<Relation> relation_between(const NormBox& a, const NormBox& b, double margin);

/// True when the interiors of the two boxes intersect.
bool boxes_overlap(const NormBox& a, const NormBox& b);

/// Four draws, in order: width, height, center x, center y.
NormBox sample_box(Rng& rng, SizeRange size_range);

struct BoxPair {
    NormBox a;
    NormBox b;
    Relation relation;  ///< relation of a with respect to b
};

/// Rejection-samples (a, b) until `relation_between(a, b, margin)` is defined.
/// Eight draws per attempt.
BoxPair sample_unambiguous_box_pair(Rng& rng, SizeRange size_range, double margin, int max_attempts);

double distance(NormPoint p, NormPoint q);

/// Index of the unique nearest candidate. Throws AmbiguityError when the
/// runner-up is not at least `gap` farther than the winner.
std::size_t closest_index(NormPoint target, std::span<const NormPoint> candidates, double gap);

struct LabeledPointParams {
    int n = 4;
    double min_separation = 0.15;
    /// When set, the last point is the target and its nearest neighbour among
    /// the others must win by at least this much.
    std::optional<double> closest_gap = 0.05;
    int max_attempts = 1000;
    /// Points are drawn from [inset_x, 1 - inset_x] x [inset_y, 1 - inset_y].
    double inset_x = 0.0;
    double inset_y = 0.0;
    MetricScale metric;
};

/// 2n draws per attempt (x then y for each point).
std::vector<NormPoint> sample_labeled_points(Rng& rng, const LabeledPointParams& params);

}  // namespace pgt
