// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgt/error.hpp"

namespace pgt {

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

struct PixelRect {
    int x0, y0, x1, y1;  // half-open
};

PixelRect box_pixels(const NormBox& box, int width, int height) {
    PixelRect r{round_half_up(box.left() * width), round_half_up(box.top() * height),
                round_half_up(box.right() * width), round_half_up(box.bottom() * height)};
    r.x0 = std::clamp(r.x0, 0, width);
    r.x1 = std::clamp(r.x1, 0, width);
    r.y0 = std::clamp(r.y0, 0, height);
    r.y1 = std::clamp(r.y1, 0, height);
    return r;
}

// Calls sink(x, y, rgb, alpha) for each pixel a command touches; alpha 1 is opaque.
template <typename Sink>
void rasterize(const DrawCommand& command, int width, int height, Sink&& sink) {
    if (const auto* box = std::get_if<BoxOutline>(&command)) {
        const auto r = box_pixels(box->box, width, height);
        const Rgb c = rgb_of(box->color);
        const int s = box->stroke;
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x)
                if (x < r.x0 + s || x >= r.x1 - s || y < r.y0 + s || y >= r.y1 - s)
                    sink(x, y, c, 1.0);
    } else if (const auto* circle = std::get_if<FilledCircle>(&command)) {
        const double cx = circle->center.x * width;
        const double cy = circle->center.y * height;
        const double radius = circle->radius * std::min(width, height);
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + radius)));
        const Rgb c = rgb_of(circle->color);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (disk_contains(*circle, width, height, x, y)) sink(x, y, c, circle->alpha);
    } else if (const auto* label = std::get_if<Label>(&command)) {
        const auto rows = glyph_rows(label->glyph);
        if (!rows) return;
        const int s = label->scale;
        const int ox = round_half_up(label->center.x * width - 2.5 * s);
        const int oy = round_half_up(label->center.y * height - 3.5 * s);
        const Rgb c = rgb_of(label->ink);
        for (int row = 0; row < 7; ++row)
            for (int col = 0; col < 5; ++col) {
                if (!(((*rows)[row] >> (4 - col)) & 1)) continue;
                for (int dy = 0; dy < s; ++dy)
                    for (int dx = 0; dx < s; ++dx) {
                        const int x = ox + col * s + dx;
                        const int y = oy + row * s + dy;
                        if (x >= 0 && x < width && y >= 0 && y < height) sink(x, y, c, 1.0);
                    }
            }
    }
}

void paint(Canvas& canvas, int x, int y, Rgb c, double alpha) {
    if (alpha >= 1.0) {
        canvas.set(x, y, c);
        return;
    }
    const Rgb d = canvas.at(x, y);
    canvas.set(x, y, {blend_pixel(d.r, c.r, alpha), blend_pixel(d.g, c.g, alpha),
                      blend_pixel(d.b, c.b, alpha)});
}

}  // namespace

Rgb rgb_of(Ink ink) { return ink == Ink::Black ? Rgb{0, 0, 0} : Rgb{255, 255, 255}; }

std::string_view to_string(Ink ink) { return ink == Ink::Black ? "black" : "white"; }

std::optional<Ink> ink_from_string(std::string_view name) {
    if (name == "black") return Ink::Black;
    if (name == "white") return Ink::White;
    return std::nullopt;
}

Ink contrasting_ink(Rgb bg) {
    const int luma1000 = 299 * bg.r + 587 * bg.g + 114 * bg.b;
    return luma1000 > 140 * 1000 ? Ink::Black : Ink::White;
}

void validate_overlay(const OverlaySpec& spec) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto where = "overlay command " + std::to_string(i) + ": ";
        if (const auto* box = std::get_if<BoxOutline>(&spec[i])) {
            if (!box->box.valid()) throw ContractError(where + "box is not inside the unit square");
            if (box->stroke < 1) throw ContractError(where + "stroke must be >= 1");
        } else if (const auto* circle = std::get_if<FilledCircle>(&spec[i])) {
            if (!circle->center.valid()) throw ContractError(where + "circle center outside [0,1]^2");
            if (!(circle->radius > 0.0) || !(circle->radius < 1.0))
                throw ContractError(where + "circle radius must be in (0,1)");
            if (!(circle->alpha > 0.0) || !(circle->alpha < 1.0))
                throw ContractError(where + "circle alpha must be in (0,1)");
        } else if (const auto* label = std::get_if<Label>(&spec[i])) {
            if (!label->center.valid()) throw ContractError(where + "label center outside [0,1]^2");
            if (!glyph_rows(label->glyph)) throw ContractError(where + "glyph must be A-Z");
            if (label->scale < 1) throw ContractError(where + "label scale must be >= 1");
        }
    }
}

Canvas gray_canvas(int width, int height, std::uint8_t gray_level) {
    return Canvas(width, height, {gray_level, gray_level, gray_level});
}

std::uint8_t blend_pixel(std::uint8_t dst, std::uint8_t src, double alpha) {
    const double v = std::floor(alpha * src + (1.0 - alpha) * dst + 0.5);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

bool disk_contains(const FilledCircle& circle, int width, int height, int x, int y) {
    const double dx = (x + 0.5) - circle.center.x * width;
    const double dy = (y + 0.5) - circle.center.y * height;
    const double r = circle.radius * std::min(width, height);
    return dx * dx + dy * dy < r * r;
}

void compose_into(Canvas& canvas, const OverlaySpec& spec) {
    validate_overlay(spec);
    for (const auto& command : spec)
        rasterize(command, canvas.width(), canvas.height(),
                  [&](int x, int y, Rgb c, double alpha) { paint(canvas, x, y, c, alpha); });
}

Canvas compose(const Canvas& canvas, const OverlaySpec& spec) {
    Canvas out = canvas;
    compose_into(out, spec);
    return out;
}

OverlayRaster rasterize_overlay_only(const OverlaySpec& spec, int width, int height) {
    validate_overlay(spec);
    OverlayRaster raster{Canvas(width, height),
                         std::vector<std::int32_t>(static_cast<std::size_t>(width) * height, -1)};
    for (std::size_t i = 0; i < spec.size(); ++i)
        rasterize(spec[i], width, height, [&](int x, int y, Rgb c, double alpha) {
            paint(raster.canvas, x, y, c, alpha);
            raster.coverage[static_cast<std::size_t>(y) * width + x] = static_cast<std::int32_t>(i);
        });
    return raster;
}

}  // namespace pgt
