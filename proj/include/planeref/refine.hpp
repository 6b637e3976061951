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
#include <vector>

#include "planeref/config.hpp"
#include "planeref/geom.hpp"
#include "planeref/linefit.hpp"
#include "planeref/raster.hpp"

namespace planeref {

/// One cluster of candidate segments believed to describe the same edge.
/// A holds start-point candidates, B end-point candidates; each side is the
/// member endpoints plus up to `candidate_samples` extract pixels sampled
/// near the side's centroid.
struct EdgeHypothesis {
    std::vector<SegmentCandidate> members;
    NormalLine line; // support-weighted average of the member normal forms
    std::vector<Point> A;
    std::vector<Point> B;
    Point centroid_a;
    Point centroid_b;
};

struct EdgeChoice {
    Point a;
    Point b;
    double cost = 0;
};

struct SelectedEdge {
    Point a;
    Point b;
    NormalLine line;
};

struct RefineReport {
    int mask_id = 0;
    Polygon refined;
    RasterMask refined_mask;
    bool used_fallback = false;
    double prior_iou = 0; // IoU of the raw assembled mask vs. the prior
    std::vector<EdgeChoice> edges;
};

/// Groups candidates into per-edge hypotheses: DBSCAN in (rho, theta*scale)
/// space (scale = image diagonal / pi), members oriented consistently, then
/// k-means (k = 2) over all endpoints splits side A from side B, and each
/// side is topped up with seeded samples from the extract near its centroid.
std::vector<EdgeHypothesis> cluster_edges(std::span<const SegmentCandidate> candidates,
                                          const ContourExtract& extract,
                                          const RefineConfig& cfg, std::uint64_t seed);

/// C(Pa, Pb) = 0.5 * I + 0.5 * |Pa - Pb| / max_{k in A, l in B} |Pk - Pl|
/// where I is the fraction of the 1-px line raster between Pa and Pb that
/// lands on m_e. Returns 0 for coincident endpoints.
double edge_cost(const Point& pa, const Point& pb, const EdgeMap& m_e,
                 std::span<const Point> A, std::span<const Point> B);

/// Exhaustive argmax of edge_cost over A x B. Ties break toward the longer
/// segment, then lexicographic point order.
EdgeChoice select_endpoints(const EdgeHypothesis& h, const EdgeMap& m_e);

/// Orders edges by the angle of their midpoint around the prior centroid
/// and walks them: consecutive edge lines contribute their intersection as
/// a vertex when it lies within vicinity_radius of both edges' nearer
/// endpoints, otherwise the two facing endpoints bridge the gap. Throws
/// InsufficientEdges for fewer than 3 edges or a non-simple result.
Polygon assemble_mask(std::span<const SelectedEdge> edges, const RasterMask& prior,
                      double vicinity_radius);

/// Convex hull of the prior's boundary pixel centers, simplified to at most
/// max_points vertices.
Polygon fallback_mask(const RasterMask& prior, int max_points);

/// Gate rule: fall back when assembly failed or IoU(refined, prior) is
/// strictly below cfg.fallback_iou.
bool should_fallback(const std::optional<Polygon>& assembled, double refined_prior_iou,
                     const RefineConfig& cfg);

/// Applies the consistency gate to an assembled polygon and produces the
/// final report (the tail of refine_mask, callable on its own).
RefineReport finalize_report(int mask_id, const std::optional<Polygon>& assembled,
                             std::vector<EdgeChoice> choices, const RasterMask& prior,
                             const RefineConfig& cfg);

/// Full per-mask pipeline: contour extract, corner split + RANSAC segments,
/// extension search, Hough segments, hypothesis clustering, endpoint
/// selection, assembly, rasterization, consistency gate.
RefineReport refine_mask(const RasterMask& prior, const EdgeMap& edges,
                         const RefineConfig& cfg, int mask_id = 0);

/// JSON serialization of a report (mask id, polygon, gate flag, IoU
/// diagnostics, per-edge endpoints and costs).
std::string report_to_json(const RefineReport& report);

} // namespace planeref
