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
#include <span>
#include <vector>

#include "planeref/cluster.hpp"
#include "planeref/config.hpp"
#include "planeref/edges.hpp"
#include "planeref/geom.hpp"
#include "planeref/raster.hpp"

namespace planeref {

/// Edge pixels inside the widened contour band of one mask.
struct ContourExtract {
    int width = 0;
    int height = 0;
    int mask_id = 0;
    std::vector<Point> pixels;

    EdgeMap as_edge_map() const;
};

struct SegmentCandidate {
    enum class Source { clustering, hough };

    LineSegment segment;
    Source source = Source::clustering;
    int support = 0; // edge pixels within 2 px of the segment
};

/// Count of pixels within 2 px of the segment.
int segment_support(const LineSegment& seg, std::span<const Point> pixels);

/// edges AND dilate(mask_contour(mask), widen_radius).
ContourExtract extract_contour(const EdgeMap& edges, const RasterMask& mask,
                               int widen_radius, int mask_id = 0);

/// First extractor: split the extract at the detected corners, DBSCAN the
/// remainder, drop small or blob-shaped clusters, RANSAC-fit each survivor
/// and take the inlier extremes along the fitted direction as endpoints.
std::vector<SegmentCandidate> segments_by_clustering(const ContourExtract& extract,
                                                     const CornerSet& corners,
                                                     const RefineConfig& cfg,
                                                     std::uint64_t seed);

/// Searches the full edge map in a band around the segment's line for an
/// extension: DBSCAN the band pixels, keep the cluster closest to the
/// original midpoint, refit, endpoints from the inlier extremes. Falls back
/// to the input segment when the band holds nothing usable.
SegmentCandidate extend_segment(const SegmentCandidate& seg, const EdgeMap& edges,
                                const RefineConfig& cfg, std::uint64_t seed);

/// Second extractor: Hough accumulator over the extract, peaks clustered
/// and averaged into lines, endpoints from line-line intersections that
/// pass the vicinity test (a circle of cfg.vicinity_radius around the
/// intersection touches the extract). For each line the two surviving
/// intersections farthest apart become the segment; lines with fewer than
/// two plausible intersections are dropped.
std::vector<SegmentCandidate> segments_by_hough(const ContourExtract& extract,
                                                const RefineConfig& cfg);

// Hough internals, exposed for the accumulator-oracle tests.
struct HoughGrid {
    int n_theta = 180;   // 1 degree resolution
    int rho_offset = 0;  // bin index of rho = 0
    int n_rho = 0;
    std::vector<std::uint32_t> accum;

    std::uint32_t at(int theta_bin, int rho_bin) const {
        return accum[static_cast<std::size_t>(theta_bin) * n_rho + rho_bin];
    }
};

HoughGrid hough_transform(std::span<const Point> points, int width, int height);

/// Averaged peak lines of the grid: cells with at least min_votes are
/// grouped greedily, the strongest remaining cell absorbing every cell
/// within rho_eps px and theta_eps degrees of it (with (rho, theta) ~
/// (-rho, theta +- pi) wraparound), vote-weighted averaged into one
/// NormalLine per group.
std::vector<NormalLine> hough_peak_lines(const HoughGrid& grid, std::uint32_t min_votes,
                                         double rho_eps, double theta_eps_deg);

} // namespace planeref
