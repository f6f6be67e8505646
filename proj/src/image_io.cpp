// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgt/image_io.hpp"

#include <jpeglib.h>
#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <system_error>

#include "pgt/error.hpp"

namespace pgt {

namespace {

namespace fs = std::filesystem;

std::string lower_extension(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::vector<unsigned char> read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open image: " + path.string());
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec) throw MissingFile("cannot stat image: " + path.string());
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw IoError("short read: " + path.string());
    return bytes;
}

Canvas decode_png(const std::vector<unsigned char>& bytes, const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw DecodeError("not a decodable PNG: " + path.string() + " (" + image.message + ")");
    image.format = PNG_FORMAT_RGB;
    if (image.width == 0 || image.height == 0 || image.width > (1u << 15) || image.height > (1u << 15)) {
        png_image_free(&image);
        throw DecodeError("unsupported PNG dimensions: " + path.string());
    }
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        const std::string message = image.message;
        png_image_free(&image);
        throw DecodeError("PNG decode failed: " + path.string() + " (" + message + ")");
    }
    return Canvas::from_pixels(static_cast<int>(image.width), static_cast<int>(image.height),
                               std::move(pixels));
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

Canvas decode_jpeg(const std::vector<unsigned char>& bytes, const fs::path& path) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.message[0] = '\0';
    // Declared before setjmp so the jump back never skips its destructor.
    std::vector<std::uint8_t> pixels;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("JPEG decode failed: " + path.string() + " (" + err.message + ")");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const int width = static_cast<int>(cinfo.output_width);
    const int height = static_cast<int>(cinfo.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return Canvas::from_pixels(width, height, std::move(pixels));
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

Canvas load_image(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw MissingFile("image not found: " + path.string());
    const auto ext = lower_extension(path);
    if (ext == ".png") return decode_png(read_all(path), path);
    if (ext == ".jpg" || ext == ".jpeg") return decode_jpeg(read_all(path), path);
    throw UnsupportedFormat("unsupported image format '" + ext + "': " + path.string());
}

void save_image(const Canvas& canvas, const fs::path& path, int compression_level) {
    if (compression_level < 0 || compression_level > 9)
        throw ParameterError("PNG compression level must be in [0, 9]");
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file) throw IoError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + path.string());
    }
    png_init_io(png, file.get());
    png_set_compression_level(png, compression_level);
    // One fixed filter plus run-length matching: overlays on flat or smooth
    // backgrounds leave long zero runs after the Up filter.
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
    png_set_compression_strategy(png, Z_RLE);
    png_set_IHDR(png, info, static_cast<png_uint_32>(canvas.width()),
                 static_cast<png_uint_32>(canvas.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const auto pixels = canvas.pixels();
    const std::size_t stride = static_cast<std::size_t>(canvas.width()) * 3;
    for (int y = 0; y < canvas.height(); ++y)
        png_write_row(png, const_cast<png_bytep>(pixels.data() + stride * y));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) throw IoError("write failed: " + path.string());
}

}  // namespace pgt
