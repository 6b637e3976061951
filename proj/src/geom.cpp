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

#include "planeref/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace planeref {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool lex_less(const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

} // namespace

double Polygon::area() const {
    double s = 0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = vertices[i];
        const Point& q = vertices[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(s);
}

Point Polygon::vertex_centroid() const {
    Point c;
    for (const auto& v : vertices) {
        c.x += v.x;
        c.y += v.y;
    }
    const double n = static_cast<double>(vertices.size());
    return {c.x / n, c.y / n};
}

std::optional<Point> intersect(const NormalLine& l1, const NormalLine& l2) {
    const double det = std::sin(l2.theta - l1.theta);
    if (std::abs(det) < 1e-6) return std::nullopt;
    const double c1 = std::cos(l1.theta), s1 = std::sin(l1.theta);
    const double c2 = std::cos(l2.theta), s2 = std::sin(l2.theta);
    // [c1 s1; c2 s2] [x y]^T = [rho1 rho2]^T
    const double x = (l1.rho * s2 - l2.rho * s1) / det;
    const double y = (l2.rho * c1 - l1.rho * c2) / det;
    return Point{x, y};
}

Polygon convex_hull(std::span<const Point> points) {
    if (points.size() < 3) throw DegenerateInput("convex_hull: fewer than 3 points");

    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) throw DegenerateInput("convex_hull: fewer than 3 distinct points");

    const std::size_t n = pts.size();
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) { // upper
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point equals the first

    if (hull.size() < 3) throw DegenerateInput("convex_hull: all points collinear");
    return Polygon{std::move(hull)};
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0) return distance(p, a);
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace {

// Iterative Douglas-Peucker over an open chain; marks kept vertices.
void dp_mark(const std::vector<Point>& chain, double eps, std::vector<char>& keep) {
    keep.assign(chain.size(), 0);
    if (chain.empty()) return;
    keep.front() = keep.back() = 1;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, chain.size() - 1}};
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        if (hi <= lo + 1) continue;
        double worst = -1;
        std::size_t split = lo;
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const double d = point_segment_distance(chain[i], chain[lo], chain[hi]);
            if (d > worst) {
                worst = d;
                split = i;
            }
        }
        if (worst > eps) {
            keep[split] = 1;
            stack.emplace_back(lo, split);
            stack.emplace_back(split, hi);
        }
    }
}

std::vector<Point> dp_run(const std::vector<Point>& chain, double eps) {
    std::vector<char> keep;
    dp_mark(chain, eps, keep);
    std::vector<Point> out;
    for (std::size_t i = 0; i < chain.size(); ++i)
        if (keep[i]) out.push_back(chain[i]);
    return out;
}

} // namespace

Polygon simplify(const Polygon& poly, std::size_t max_points) {
    if (max_points < 3) throw InvalidArgument("simplify: max_points must be >= 3");
    const auto& v = poly.vertices;
    if (v.size() <= max_points) return poly;

    // Anchor the closed polygon at its two farthest-apart vertices, then
    // reduce the two resulting open chains.
    std::size_t ia = 0, ib = 1;
    double best = -1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double d = distance(v[i], v[j]);
            if (d > best) {
                best = d;
                ia = i;
                ib = j;
            }
        }

    std::vector<Point> chain1(v.begin() + ia, v.begin() + ib + 1);
    std::vector<Point> chain2(v.begin() + ib, v.end());
    chain2.insert(chain2.end(), v.begin(), v.begin() + ia + 1);

    for (double eps = 0.5;; eps *= 2) {
        const auto keep1 = dp_run(chain1, eps);
        auto keep2 = dp_run(chain2, eps);
        std::vector<Point> merged = keep1;
        merged.insert(merged.end(), keep2.begin() + 1, keep2.end() - 1);
        if (merged.size() <= max_points) {
            if (merged.size() >= 3) return Polygon{std::move(merged)};
            // Both chains collapsed to the anchors; keep the vertex farthest
            // from the anchor chord so a valid triangle remains.
            double worst = -1;
            std::size_t pick = (ia + 1) % v.size();
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i == ia || i == ib) continue;
                const double d = point_segment_distance(v[i], v[ia], v[ib]);
                if (d > worst) {
                    worst = d;
                    pick = i;
                }
            }
            std::vector<Point> tri;
            if (pick > ia && pick < ib)
                tri = {v[ia], v[pick], v[ib]};
            else
                tri = {v[ia], v[ib], v[pick]};
            return Polygon{std::move(tri)};
        }
    }
}

RasterMask rasterize(const Polygon& poly, int width, int height) {
    if (poly.vertices.size() < 3) throw DegenerateInput("rasterize: polygon needs >= 3 vertices");
    if (width < 1 || height < 1) throw InvalidArgument("rasterize: empty target raster");

    RasterMask out(width, height);
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    std::vector<double> xs;
    xs.reserve(8);

    // Pixel (x, y) counts when the lattice point (x, y) is inside under the
    // even-odd rule; boundaries are half-open so shared edges never double.
    for (int y = 0; y < height; ++y) {
        const double yc = y;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = v[i];
            const Point& q = v[(i + 1) % n];
            if ((p.y <= yc && q.y > yc) || (q.y <= yc && p.y > yc)) {
                const double t = (yc - p.y) / (q.y - p.y);
                xs.push_back(p.x + t * (q.x - p.x));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int x0 = static_cast<int>(std::ceil(xs[k]));
            int x1 = static_cast<int>(std::ceil(xs[k + 1])) - 1;
            x0 = std::max(x0, 0);
            x1 = std::min(x1, width - 1);
            for (int x = x0; x <= x1; ++x) out.set(x, y, true);
        }
    }
    return out;
}

NormalLine segment_to_normal(const LineSegment& seg) {
    const double dx = seg.b.x - seg.a.x, dy = seg.b.y - seg.a.y;
    if (std::hypot(dx, dy) < 1e-12) throw DegenerateInput("segment_to_normal: degenerate segment");
    double theta = std::atan2(dx, -dy); // angle of the normal (-dy, dx)
    if (theta < 0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    const double rho = seg.a.x * std::cos(theta) + seg.a.y * std::sin(theta);
    return NormalLine{rho, theta};
}

NormalLine line_through(const Point& a, const Point& b) {
    return segment_to_normal(LineSegment{a, b});
}

std::vector<std::pair<int, int>> line_pixels(const Point& a, const Point& b) {
    int x0 = static_cast<int>(std::llround(a.x));
    int y0 = static_cast<int>(std::llround(a.y));
    int x1 = static_cast<int>(std::llround(b.x));
    int y1 = static_cast<int>(std::llround(b.y));
    // Canonical order keeps the chain identical regardless of endpoint order.
    if (x1 < x0 || (x1 == x0 && y1 < y0)) {
        std::swap(x0, x1);
        std::swap(y0, y1);
    }

    std::vector<std::pair<int, int>> px;
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
        px.emplace_back(x, y);
        if (x == x1 && y == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return px;
}

bool polygon_is_simple(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;

    auto seg_intersect = [](const Point& a, const Point& b, const Point& c, const Point& d) {
        const double d1 = cross(c, d, a);
        const double d2 = cross(c, d, b);
        const double d3 = cross(a, b, c);
        const double d4 = cross(a, b, d);
        if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
            ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
            return true;
        auto on_segment = [](const Point& p, const Point& q, const Point& r) {
            return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
                   std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
        };
        if (d1 == 0 && on_segment(c, d, a)) return true;
        if (d2 == 0 && on_segment(c, d, b)) return true;
        if (d3 == 0 && on_segment(a, b, c)) return true;
        if (d4 == 0 && on_segment(a, b, d)) return true;
        return false;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges sharing a vertex (adjacent, incl. the wrap pair).
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (seg_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

Point mask_centroid(const RasterMask& mask) {
    if (mask.empty()) throw EmptyMask("mask_centroid: empty mask");
    double sx = 0, sy = 0;
    std::size_t c = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.get(x, y)) {
                sx += x;
                sy += y;
                ++c;
            }
    return {sx / c, sy / c};
}

} // namespace planeref
