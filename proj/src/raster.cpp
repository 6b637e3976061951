// Copyright 2026 The planeref Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "planeref/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

#include <png.h>

#include "planeref/kernels.hpp"

namespace planeref {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Decodes any PNG to 8-bit, either grayscale or RGB. channels comes back
// as 1 or 3.
std::vector<std::uint8_t> read_png(const std::string& path, int& width, int& height,
                                   int& channels) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw MalformedImage("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }

    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw MalformedImage("malformed PNG: " + path);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (width < 1 || height < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw MalformedImage("zero-dimension PNG: " + path);
    }

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_byte updated = png_get_color_type(png, info);
    channels = (updated == PNG_COLOR_TYPE_GRAY) ? 1 : 3;

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = pixels.data() + rowbytes * y;

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    // Compact rows in case rowbytes > width*channels (it never is for the
    // formats produced above, but keep the invariant explicit).
    const std::size_t want = static_cast<std::size_t>(width) * channels;
    if (rowbytes != want) {
        std::vector<std::uint8_t> tight(want * height);
        for (int y = 0; y < height; ++y)
            std::copy_n(pixels.data() + rowbytes * y, want, tight.data() + want * y);
        pixels = std::move(tight);
    }
    return pixels;
}

void write_png(const std::string& path, const std::uint8_t* data, int width, int height,
               int channels) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot write file: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + static_cast<std::size_t>(y) * width * channels);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double v = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::lround(v));
}

} // namespace

std::size_t RasterMask::count() const {
    return static_cast<std::size_t>(
        std::accumulate(bits.begin(), bits.end(), std::uint64_t{0}));
}

std::size_t EdgeMap::count() const {
    return static_cast<std::size_t>(
        std::accumulate(bits.begin(), bits.end(), std::uint64_t{0}));
}

GrayImage load_gray(const std::string& path) {
    int w = 0, h = 0, channels = 0;
    const auto pixels = read_png(path, w, h, channels);

    GrayImage img(w, h);
    if (channels == 1) {
        img.data.assign(pixels.begin(), pixels.end());
    } else {
        for (std::size_t i = 0; i < img.size(); ++i)
            img.data[i] = luma(pixels[3 * i], pixels[3 * i + 1], pixels[3 * i + 2]);
    }
    return img;
}

RasterMask load_mask(const std::string& path) {
    const GrayImage img = load_gray(path);
    RasterMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) mask.bits[i] = img.data[i] >= 128 ? 1 : 0;
    return mask;
}

EdgeMap load_edge_map(const std::string& path) {
    const GrayImage img = load_gray(path);
    EdgeMap map(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) map.bits[i] = img.data[i] >= 128 ? 1 : 0;
    return map;
}

void save_gray(const GrayImage& img, const std::string& path) {
    write_png(path, img.data.data(), img.width, img.height, 1);
}

void save_mask(const RasterMask& mask, const std::string& path) {
    std::vector<std::uint8_t> bytes(mask.bits.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.bits[i] ? 255 : 0;
    write_png(path, bytes.data(), mask.width, mask.height, 1);
}

void save_edge_map(const EdgeMap& map, const std::string& path) {
    std::vector<std::uint8_t> bytes(map.bits.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = map.bits[i] ? 255 : 0;
    write_png(path, bytes.data(), map.width, map.height, 1);
}

void save_rgb(const std::vector<std::uint8_t>& rgb, int width, int height,
              const std::string& path) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw InvalidArgument("RGB buffer size does not match dimensions");
    write_png(path, rgb.data(), width, height, 3);
}

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1) throw InvalidArgument("resize target must be positive");
    if (new_width == img.width && new_height == img.height) return img;

    GrayImage out(new_width, new_height);
    const double sx = static_cast<double>(img.width) / new_width;
    const double sy = static_cast<double>(img.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        // Map the output pixel center into source coordinates.
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int x = 0; x < new_width; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            const double top = (1 - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
            const double bot = (1 - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround((1 - wy) * top + wy * bot));
        }
    }
    return out;
}

EdgeMap mask_contour(const RasterMask& mask) {
    if (mask.empty()) throw EmptyMask("mask_contour: empty mask");

    EdgeMap out(mask.width, mask.height);
    const int w = mask.width, h = mask.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            const bool boundary =
                x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                !mask.get(x - 1, y) || !mask.get(x + 1, y) ||
                !mask.get(x, y - 1) || !mask.get(x, y + 1);
            if (boundary) out.set(x, y, true);
        }
    }
    return out;
}

EdgeMap dilate(const EdgeMap& map, int radius) {
    if (radius < 0) throw InvalidArgument("dilate: negative radius");
    if (radius == 0) return map;
    EdgeMap out(map.width, map.height);
    kern::dilate_chebyshev(map.bits.data(), out.bits.data(), map.width, map.height, radius);
    return out;
}

RasterMask dilate_mask(const RasterMask& mask, int radius) {
    if (radius < 0) throw InvalidArgument("dilate_mask: negative radius");
    if (radius == 0) return mask;
    RasterMask out(mask.width, mask.height);
    kern::dilate_chebyshev(mask.bits.data(), out.bits.data(), mask.width, mask.height, radius);
    return out;
}

RasterMask erode_mask(const RasterMask& mask, int radius) {
    if (radius < 0) throw InvalidArgument("erode_mask: negative radius");
    if (radius == 0) return mask;
    // Erosion = complement of dilation of the complement. Pixels outside the
    // frame count as false, so the border erodes naturally.
    RasterMask inv(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) inv.bits[i] = mask.bits[i] ? 0 : 1;
    RasterMask grown(mask.width, mask.height);
    kern::dilate_chebyshev(inv.bits.data(), grown.bits.data(), mask.width, mask.height, radius);
    // Border handling: a true pixel within `radius` of the frame must erode.
    RasterMask out(mask.width, mask.height);
    const int w = mask.width, h = mask.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool near_border = x < radius || y < radius || x >= w - radius || y >= h - radius;
            out.set(x, y, mask.get(x, y) && !grown.get(x, y) && !near_border);
        }
    return out;
}

double mask_iou(const RasterMask& a, const RasterMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch("mask_iou: dimension mismatch");
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        inter += (a.bits[i] & b.bits[i]);
        uni += (a.bits[i] | b.bits[i]);
    }
    if (uni == 0) return 1.0; // both empty: vacuously equal
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace planeref
