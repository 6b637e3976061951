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
#include <functional>
#include <span>
#include <vector>

#include "planeref/geom.hpp"

namespace planeref {

struct ClusterLabeling {
    static constexpr int kNoise = -1;

    std::vector<int> labels; // per point: cluster id in [0, k) or kNoise
    int k = 0;
};

/// Density-based clustering. A point is core when at least min_pts points
/// (itself included) lie within eps. Clusters are discovered in input
/// order, so the labeling is deterministic: a border point reachable from
/// several clusters joins the first-discovered one.
ClusterLabeling dbscan(std::span<const Point> points, double eps, int min_pts);

/// Same semantics with a caller-supplied metric; O(n^2), meant for small
/// inputs such as line normal forms.
ClusterLabeling dbscan_custom(std::size_t n,
                              const std::function<double(std::size_t, std::size_t)>& dist,
                              double eps, int min_pts);

struct KMeansResult {
    ClusterLabeling labeling;
    std::vector<Point> centroids;
    /// Objective (sum of squared distances) after each Lloyd iteration,
    /// including the value right after initialization.
    std::vector<double> objective_history;
};

/// Lloyd iterations from seeded k-means++ initialization. Stops when the
/// assignment is stable or after 100 iterations. Throws for k < 1 or
/// fewer points than k.
KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed);

struct FittedLine {
    NormalLine model;
    std::vector<std::size_t> inliers;
    double residual_threshold = 0;
};

/// Total-least-squares line through the points (principal axis).
FittedLine fit_line_tls(std::span<const Point> points);

/// RANSAC: best two-point hypothesis by inlier count (ties by lower total
/// residual), refit by TLS on its inliers, inliers re-collected against the
/// refit model. Works for vertical lines since the model is a NormalLine.
/// Throws for fewer than two distinct points.
FittedLine ransac_line(std::span<const Point> points, double inlier_tol,
                       int iterations, std::uint64_t seed);

} // namespace planeref
