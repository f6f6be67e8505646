// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "pgt/canvas.hpp"
#include "pgt/geometry.hpp"

namespace pgt {

/// Label glyph colour, picked for contrast against the disk underneath.
enum class Ink : std::uint8_t { Black, White };

Rgb rgb_of(Ink ink);
std::string_view to_string(Ink ink);
std::optional<Ink> ink_from_string(std::string_view name);

/// Black on light colours, white on dark ones (integer BT.601 luma > 140).
Ink contrasting_ink(Rgb background);

/// Opaque axis-aligned rectangle outline; the stroke lies inside the box.
struct BoxOutline {
    NormBox box;
    ColorId color = ColorId::Green;
    int stroke = 2;
    friend bool operator==(const BoxOutline&, const BoxOutline&) = default;
};

/// Alpha-blended disk. `radius` is a fraction of min(width, height).
struct FilledCircle {
    NormPoint center;
    double radius = 0.05;
    ColorId color = ColorId::Orange;
    double alpha = 0.55;
    friend bool operator==(const FilledCircle&, const FilledCircle&) = default;
};

/// Opaque capital letter from the built-in 5x7 font, each font cell drawn as
/// a `scale` x `scale` block, centered on `center`.
struct Label {
    NormPoint center;
    char glyph = 'A';
    Ink ink = Ink::Black;
    int scale = 2;
    friend bool operator==(const Label&, const Label&) = default;
};

using DrawCommand = std::variant<BoxOutline, FilledCircle, Label>;

/// Draw commands in the order they are applied.
using OverlaySpec = std::vector<DrawCommand>;

/// Throws ContractError on a malformed command (alpha outside (0,1), box
/// outside the unit square, glyph outside A-Z, non-positive stroke/scale/radius).
void validate_overlay(const OverlaySpec& spec);

/// 5x7 bitmap rows for 'A'..'Z'; bit 4 is the leftmost column.
std::optional<std::array<std::uint8_t, 7>> glyph_rows(char glyph);

Canvas gray_canvas(int width, int height, std::uint8_t gray_level);

/// round-half-up(alpha * src + (1 - alpha) * dst), saturated to [0, 255].
std::uint8_t blend_pixel(std::uint8_t dst, std::uint8_t src, double alpha);

/// Pixel-space disk membership: the pixel center (x + 0.5, y + 0.5) lies
/// strictly within radius * min(width, height) of the circle center.
bool disk_contains(const FilledCircle& circle, int width, int height, int x, int y);

/// Returns `canvas` with every command of `spec` applied in order.
Canvas compose(const Canvas& canvas, const OverlaySpec& spec);

/// As compose(), but in place.
void compose_into(Canvas& canvas, const OverlaySpec& spec);

struct OverlayRaster {
    Canvas canvas;
    /// Per pixel, the index of the last command that touched it, or -1.
    std::vector<std::int32_t> coverage;
};

/// Renders `spec` over black and records per-pixel command coverage.
OverlayRaster rasterize_overlay_only(const OverlaySpec& spec, int width, int height);

}  // namespace pgt
