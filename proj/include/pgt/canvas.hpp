// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pgt/geometry.hpp"

namespace pgt {

/// Owned 8-bit RGB raster, row-major, top-left origin, channels in R, G, B order.
class Canvas {
public:
    /// Throws ParameterError unless both dimensions are positive.
    Canvas(int width, int height, Rgb fill = {});

    /// Adopt raw pixels; `pixels.size()` must equal width * height * 3.
    static Canvas from_pixels(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::span<std::uint8_t> pixels() { return pixels_; }

    Rgb at(int x, int y) const {
        const auto i = offset(x, y);
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const auto i = offset(x, y);
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    friend bool operator==(const Canvas&, const Canvas&) = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

}  // namespace pgt
