// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/canvas.hpp"

#include <string>

#include "pgt/error.hpp"

namespace pgt {

Canvas::Canvas(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
        throw ParameterError("canvas dimensions must be positive, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    if (fill.r == fill.g && fill.g == fill.b) {
        pixels_.assign(n, fill.r);
        return;
    }
    pixels_.resize(n);
    for (std::size_t i = 0; i < n; i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

Canvas Canvas::from_pixels(int width, int height, std::vector<std::uint8_t> pixels) {
    Canvas canvas(width, height);
    if (pixels.size() != canvas.pixels_.size())
        throw ParameterError("pixel buffer size does not match " + std::to_string(width) + "x" +
                             std::to_string(height) + " RGB");
    canvas.pixels_ = std::move(pixels);
    return canvas;
}

}  // namespace pgt
