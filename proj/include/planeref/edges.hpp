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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "planeref/geom.hpp"
#include "planeref/raster.hpp"

namespace planeref {

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<float> gx;
    std::vector<float> gy;
    std::vector<float> magnitude;
    std::vector<float> direction; // radians in (-pi, pi]
};

struct CornerSet {
    std::vector<Point> points;
    std::vector<double> response;

    std::size_t size() const { return points.size(); }
};

struct CannyParams {
    double sigma = 1.4;      // Gaussian blur before gradients
    double low_ratio = 0.5;  // hysteresis low = low_ratio * high
};

/// 3x3 Sobel gradients with edge replication. Requires width, height >= 3.
GradientField sobel(const GrayImage& img);

/// Threshold maximizing between-class variance over a 256-bin histogram.
/// Ties break toward the smallest level. Throws DegenerateHistogram when
/// fewer than two bins are occupied.
int otsu_threshold(std::span<const std::uint64_t> histogram);

/// Canny with the high hysteresis threshold picked by Otsu's method on the
/// gradient-magnitude histogram (low = low_ratio * high). Blur, Sobel,
/// 4-direction non-maximum suppression, hysteresis. A flat image yields an
/// empty map.
EdgeMap adaptive_canny(const GrayImage& img, const CannyParams& params = {});

/// Reads a grayscale edge-strength PNG and binarizes at `threshold`
/// (value >= threshold is an edge). When resize_to is given and differs
/// from the file size, strengths are bilinearly resized first.
EdgeMap ingest_edge_map(const std::string& path, int threshold,
                        std::optional<std::pair<int, int>> resize_to = std::nullopt);

/// Harris corners of a binary map treated as a 0/1 intensity image.
/// Returns local maxima of R = det(M) - k trace(M)^2 with
/// R >= rel_threshold * max(R). Empty map gives an empty set.
CornerSet harris_corners(const EdgeMap& map, double k = 0.04, int window = 5,
                         double rel_threshold = 0.2);

} // namespace planeref
