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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "planeref/common.hpp"

namespace planeref {

/// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t size() const { return data.size(); }
};

/// Binary per-plane mask. Bits stored as 0/1 bytes.
struct RasterMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    RasterMask() = default;
    RasterMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

/// Binary edge raster (true = edge pixel). Same layout as RasterMask but a
/// distinct type: masks are regions, edge maps are curves.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    EdgeMap() = default;
    EdgeMap(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    std::size_t count() const;
};

// --- PNG I/O ------------------------------------------------------------
// Grayscale PNG throughout; RGB input is converted with the usual luma
// weights, luma = round(0.299 R + 0.587 G + 0.114 B). Masks and edge maps
// persist as 8-bit PNG with 0 = false, 255 = true; on read any value >= 128
// counts as true so anti-aliased exports stay usable.

GrayImage load_gray(const std::string& path);
RasterMask load_mask(const std::string& path);
EdgeMap load_edge_map(const std::string& path);

void save_gray(const GrayImage& img, const std::string& path);
void save_mask(const RasterMask& mask, const std::string& path);
void save_edge_map(const EdgeMap& map, const std::string& path);

/// Interleaved RGB writer for contour overlays.
void save_rgb(const std::vector<std::uint8_t>& rgb, int width, int height,
              const std::string& path);

/// Bilinear resample; used when an external edge map does not match the
/// working resolution.
GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);

// --- Morphology and metrics ----------------------------------------------

/// Pixels of the mask with at least one false 4-neighbor. The image border
/// counts as outside, so a full-frame mask still has a contour.
EdgeMap mask_contour(const RasterMask& mask);

/// Chebyshev (square structuring element) dilation; radius 0 is identity.
EdgeMap dilate(const EdgeMap& map, int radius);
RasterMask dilate_mask(const RasterMask& mask, int radius);
RasterMask erode_mask(const RasterMask& mask, int radius);

/// |a AND b| / |a OR b|. Two empty masks compare equal (1.0).
double mask_iou(const RasterMask& a, const RasterMask& b);

} // namespace planeref
