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

#include "planeref/linefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "planeref/common.hpp"
#include "planeref/kernels.hpp"

namespace planeref {

EdgeMap ContourExtract::as_edge_map() const {
    EdgeMap out(width, height);
    for (const auto& p : pixels)
        out.set(static_cast<int>(p.x), static_cast<int>(p.y), true);
    return out;
}

int segment_support(const LineSegment& seg, std::span<const Point> pixels) {
    int n = 0;
    for (const auto& p : pixels)
        if (point_segment_distance(p, seg.a, seg.b) <= 2.0) ++n;
    return n;
}

ContourExtract extract_contour(const EdgeMap& edges, const RasterMask& mask,
                               int widen_radius, int mask_id) {
    if (edges.width != mask.width || edges.height != mask.height)
        throw DimensionMismatch("extract_contour: edge map and mask differ in size");

    const EdgeMap band = dilate(mask_contour(mask), widen_radius);
    ContourExtract ex;
    ex.width = edges.width;
    ex.height = edges.height;
    ex.mask_id = mask_id;
    for (int y = 0; y < edges.height; ++y)
        for (int x = 0; x < edges.width; ++x)
            if (edges.get(x, y) && band.get(x, y))
                ex.pixels.push_back(Point{static_cast<double>(x), static_cast<double>(y)});
    return ex;
}

namespace {

// Project the extreme inliers onto the fitted line; those feet are the
// segment endpoints.
LineSegment endpoints_from_inliers(const FittedLine& fit, std::span<const Point> points) {
    const Point d = fit.model.direction();
    double tmin = std::numeric_limits<double>::max();
    double tmax = std::numeric_limits<double>::lowest();
    Point pmin, pmax;
    for (const std::size_t i : fit.inliers) {
        const double t = points[i].x * d.x + points[i].y * d.y;
        if (t < tmin) {
            tmin = t;
            pmin = points[i];
        }
        if (t > tmax) {
            tmax = t;
            pmax = points[i];
        }
    }
    auto foot = [&](const Point& p) {
        const double off = fit.model.signed_distance(p);
        return Point{p.x - off * std::cos(fit.model.theta), p.y - off * std::sin(fit.model.theta)};
    };
    return LineSegment{foot(pmin), foot(pmax)};
}

// Ratio of minor to major PCA eigenvalue of the point scatter; near 0 for
// elongated clusters, near 1 for blobs.
double cluster_aspect(std::span<const Point> points) {
    double mx = 0, my = 0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : points) {
        const double dx = p.x - mx, dy = p.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double tr = sxx + syy;
    if (tr < 1e-12) return 1.0;
    const double det = sxx * syy - sxy * sxy;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    const double hi = 0.5 * (tr + disc);
    const double lo = 0.5 * (tr - disc);
    if (hi <= 0) return 1.0;
    return std::max(0.0, lo) / hi;
}

} // namespace

std::vector<SegmentCandidate> segments_by_clustering(const ContourExtract& extract,
                                                     const CornerSet& corners,
                                                     const RefineConfig& cfg,
                                                     std::uint64_t seed) {
    // Split the extract at the corners so each straight stretch clusters
    // apart from its neighbours.
    std::vector<Point> pts;
    pts.reserve(extract.pixels.size());
    const double r2 = cfg.corner_removal_radius * cfg.corner_removal_radius;
    for (const auto& p : extract.pixels) {
        bool near_corner = false;
        for (const auto& c : corners.points) {
            const double dx = p.x - c.x, dy = p.y - c.y;
            if (dx * dx + dy * dy <= r2) {
                near_corner = true;
                break;
            }
        }
        if (!near_corner) pts.push_back(p);
    }

    std::vector<SegmentCandidate> out;
    if (pts.size() < 2) return out;

    const ClusterLabeling labeling = dbscan(pts, cfg.dbscan_eps, cfg.dbscan_min_pts);
    for (int c = 0; c < labeling.k; ++c) {
        std::vector<Point> members;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (labeling.labels[i] == c) members.push_back(pts[i]);
        if (members.size() < static_cast<std::size_t>(cfg.min_cluster_px)) continue;
        if (cluster_aspect(members) > cfg.max_aspect) continue;

        FittedLine fit;
        try {
            fit = ransac_line(members, cfg.ransac_tol, cfg.ransac_iterations,
                              mix_seed(seed, 101 + static_cast<std::uint64_t>(c)));
        } catch (const DegenerateInput&) {
            continue;
        }
        if (fit.inliers.size() < 2) continue;

        SegmentCandidate cand;
        cand.segment = endpoints_from_inliers(fit, members);
        cand.source = SegmentCandidate::Source::clustering;
        cand.support = segment_support(cand.segment, extract.pixels);
        out.push_back(cand);
    }
    return out;
}

SegmentCandidate extend_segment(const SegmentCandidate& seg, const EdgeMap& edges,
                                const RefineConfig& cfg, std::uint64_t seed) {
    NormalLine line;
    try {
        line = segment_to_normal(seg.segment);
    } catch (const DegenerateInput&) {
        return seg;
    }

    std::vector<Point> band;
    for (int y = 0; y < edges.height; ++y)
        for (int x = 0; x < edges.width; ++x) {
            if (!edges.get(x, y)) continue;
            const Point p{static_cast<double>(x), static_cast<double>(y)};
            if (line.distance(p) <= cfg.band_radius) band.push_back(p);
        }
    if (band.size() < 2) return seg;

    const ClusterLabeling labeling = dbscan(band, cfg.dbscan_eps, cfg.dbscan_min_pts);
    if (labeling.k == 0) return seg;

    // The cluster nearest the original midpoint carries on the same edge.
    const Point mid = seg.segment.midpoint();
    std::vector<double> closest(labeling.k, std::numeric_limits<double>::max());
    for (std::size_t i = 0; i < band.size(); ++i) {
        const int l = labeling.labels[i];
        if (l < 0) continue;
        closest[l] = std::min(closest[l], distance(band[i], mid));
    }
    int pick = 0;
    for (int c = 1; c < labeling.k; ++c)
        if (closest[c] < closest[pick]) pick = c;

    std::vector<Point> members;
    for (std::size_t i = 0; i < band.size(); ++i)
        if (labeling.labels[i] == pick) members.push_back(band[i]);

    FittedLine fit;
    try {
        fit = ransac_line(members, cfg.ransac_tol, cfg.ransac_iterations, seed);
    } catch (const DegenerateInput&) {
        return seg;
    }
    if (fit.inliers.size() < 2) return seg;

    SegmentCandidate out;
    out.segment = endpoints_from_inliers(fit, members);
    out.source = seg.source;
    out.support = segment_support(out.segment, band);
    return out;
}

HoughGrid hough_transform(std::span<const Point> points, int width, int height) {
    if (width < 1 || height < 1) throw InvalidArgument("hough_transform: empty raster");
    HoughGrid grid;
    const int diag = static_cast<int>(std::ceil(std::hypot(width, height)));
    grid.rho_offset = diag;
    grid.n_rho = 2 * diag + 1;
    grid.accum.assign(static_cast<std::size_t>(grid.n_theta) * grid.n_rho, 0);

    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    kern::hough_accumulate(xs.data(), ys.data(), points.size(), grid.n_theta,
                           grid.rho_offset, grid.n_rho, grid.accum.data());
    return grid;
}

std::vector<NormalLine> hough_peak_lines(const HoughGrid& grid, std::uint32_t min_votes,
                                         double rho_eps, double theta_eps_deg) {
    struct Cell {
        double rho;
        double theta_deg;
        std::uint32_t votes;
    };
    std::vector<Cell> cells;
    for (int t = 0; t < grid.n_theta; ++t)
        for (int r = 0; r < grid.n_rho; ++r) {
            const std::uint32_t v = grid.at(t, r);
            if (v >= min_votes)
                cells.push_back({static_cast<double>(r - grid.rho_offset),
                                 static_cast<double>(t) * 180.0 / grid.n_theta, v});
        }

    std::vector<NormalLine> lines;

    // Greedy peak absorption: the strongest remaining cell claims every cell
    // inside its box and the group averages into one line. Growing from the
    // peak alone (no chaining) keeps two genuine lines apart even when a
    // ridge of above-threshold cells connects their peaks.
    std::vector<char> used(cells.size(), 0);
    for (;;) {
        std::size_t peak = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (used[i]) continue;
            if (peak == cells.size() || cells[i].votes > cells[peak].votes) peak = i;
        }
        if (peak == cells.size()) break;

        double sum_r = 0, sum_t = 0, sum_w = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (used[i]) continue;
            double rho = cells[i].rho, th = cells[i].theta_deg;
            // (rho, theta) and (-rho, theta +- 180) name the same line; use
            // whichever representation sits nearer the peak.
            if (std::abs(th - cells[peak].theta_deg) > 90.0) {
                rho = -rho;
                th += th < cells[peak].theta_deg ? 180.0 : -180.0;
            }
            if (std::abs(th - cells[peak].theta_deg) > theta_eps_deg) continue;
            // Cells voted by the same edge drift in rho as theta tilts about
            // a pivot inside the raster, so measure the gap as the closest
            // approach of the two lines over the raster span. A point at
            // tangential offset t on the peak line lies at
            // |rho_peak cos(dt) + t sin(dt) - rho| from this cell's line; for
            // parallel cells this is plain |rho_peak - rho|.
            const double dt = (th - cells[peak].theta_deg) * std::numbers::pi / 180.0;
            const double base = cells[peak].rho * std::cos(dt) - rho;
            const double slope = std::sin(dt);
            double gap = std::abs(base);
            if (slope != 0.0) {
                const double span = static_cast<double>(grid.rho_offset);
                const double t_star = -base / slope;
                gap = std::abs(t_star) <= span
                          ? 0.0
                          : std::min(std::abs(base + slope * span),
                                     std::abs(base - slope * span));
            }
            if (gap > rho_eps) continue;
            used[i] = 1;
            const double w = cells[i].votes;
            sum_r += w * rho;
            sum_t += w * th;
            sum_w += w;
        }

        double rho = sum_r / sum_w;
        double theta = (sum_t / sum_w) * std::numbers::pi / 180.0;
        while (theta < 0) {
            theta += std::numbers::pi;
            rho = -rho;
        }
        while (theta >= std::numbers::pi) {
            theta -= std::numbers::pi;
            rho = -rho;
        }
        lines.push_back(NormalLine{rho, theta});
    }
    return lines;
}

std::vector<SegmentCandidate> segments_by_hough(const ContourExtract& extract,
                                                const RefineConfig& cfg) {
    std::vector<SegmentCandidate> out;
    if (extract.pixels.size() < 2) return out;

    const HoughGrid grid = hough_transform(extract.pixels, extract.width, extract.height);
    const std::vector<NormalLine> lines =
        hough_peak_lines(grid, cfg.hough_votes, cfg.hough_rho_cluster, cfg.hough_theta_cluster);
    if (lines.size() < 2) return out;

    auto plausible = [&](const Point& p) {
        for (const auto& q : extract.pixels)
            if (distance(p, q) <= cfg.vicinity_radius) return true;
        return false;
    };

    std::vector<std::vector<Point>> hits(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto p = intersect(lines[i], lines[j]);
            if (!p || !plausible(*p)) continue;
            hits[i].push_back(*p);
            hits[j].push_back(*p);
        }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (hits[i].size() < 2) continue;
        std::size_t ba = 0, bb = 1;
        double best = -1;
        for (std::size_t a = 0; a < hits[i].size(); ++a)
            for (std::size_t b = a + 1; b < hits[i].size(); ++b) {
                const double d = distance(hits[i][a], hits[i][b]);
                if (d > best) {
                    best = d;
                    ba = a;
                    bb = b;
                }
            }
        SegmentCandidate cand;
        cand.segment = LineSegment{hits[i][ba], hits[i][bb]};
        cand.source = SegmentCandidate::Source::hough;
        cand.support = segment_support(cand.segment, extract.pixels);
        out.push_back(cand);
    }
    return out;
}

} // namespace planeref
