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

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "planeref/raster.hpp"

namespace planeref {

struct Point {
    double x = 0;
    double y = 0;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct LineSegment {
    Point a;
    Point b;

    double length() const { return distance(a, b); }
    Point midpoint() const { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
};

/// Line in normal form: { (x, y) : x cos(theta) + y sin(theta) = rho },
/// theta in [0, pi), rho signed.
struct NormalLine {
    double rho = 0;
    double theta = 0;

    /// Signed distance of p from the line (positive on the normal side).
    double signed_distance(const Point& p) const {
        return p.x * std::cos(theta) + p.y * std::sin(theta) - rho;
    }
    double distance(const Point& p) const { return std::abs(signed_distance(p)); }
    /// Unit direction along the line.
    Point direction() const { return {-std::sin(theta), std::cos(theta)}; }
};

/// Ordered vertex list, implicitly closed.
struct Polygon {
    std::vector<Point> vertices;

    double area() const;
    Point vertex_centroid() const;
};

/// Intersection of two lines, or nullopt when |sin(theta1 - theta2)| < 1e-6.
std::optional<Point> intersect(const NormalLine& l1, const NormalLine& l2);

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
/// Throws DegenerateInput for fewer than 3 non-collinear points.
Polygon convex_hull(std::span<const Point> points);

/// Douglas-Peucker on the closed polygon, doubling the tolerance (from
/// 0.5 px) until at most max_points vertices remain. Output vertices are a
/// subset of the input vertices.
Polygon simplify(const Polygon& poly, std::size_t max_points);

/// Even-odd scanline fill. Pixel (x, y) is sampled at the lattice point
/// (x, y); boundaries are half-open (left/top edges inclusive) so polygons
/// sharing an edge never claim the same pixel twice.
RasterMask rasterize(const Polygon& poly, int width, int height);

NormalLine segment_to_normal(const LineSegment& seg);
NormalLine line_through(const Point& a, const Point& b);

/// 1-px-thick pixel chain between the rounded endpoints (Bresenham). The
/// chain is independent of endpoint order.
std::vector<std::pair<int, int>> line_pixels(const Point& a, const Point& b);

double point_segment_distance(const Point& p, const Point& a, const Point& b);

/// True when no two non-adjacent edges intersect.
bool polygon_is_simple(const Polygon& poly);

/// Mean of the true-pixel centers.
Point mask_centroid(const RasterMask& mask);

} // namespace planeref
