// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "pgt/canvas.hpp"

namespace pgt {

/// Decodes a PNG (.png) or JPEG (.jpg/.jpeg) file to RGB. Grayscale and
/// palette images are expanded, alpha is dropped.
/// Throws MissingFile, UnsupportedFormat (other extensions) or DecodeError.
Canvas load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG with no timestamp or text chunks, so the bytes
/// depend only on the pixels and `compression_level` (0-9).
void save_image(const Canvas& canvas, const std::filesystem::path& path, int compression_level = 6);

}  // namespace pgt
