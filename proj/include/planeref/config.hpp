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

#include "planeref/common.hpp"

namespace planeref {

/// Which raster the endpoint cost overlaps the candidate line against.
enum class CostMaskSource {
    extract, // the per-mask extract of the binary edge image (default)
    prior,   // the prior segmentation mask
};

/// Every tunable of the refinement pipeline in one place. Values with a
/// source in the literature keep that default (0.75 consistency gate,
/// 20-point fallback polygon, 40 px vicinity radius, 10 sampled endpoint
/// candidates); the rest are exposed knobs.
struct RefineConfig {
    // Contour extraction
    int widen_radius = 5;

    // DBSCAN over edge pixels
    double dbscan_eps = 3.0;
    int dbscan_min_pts = 4;

    // RANSAC line fitting
    double ransac_tol = 2.0;
    int ransac_iterations = 200;

    // Corner detection / cluster splitting
    double corner_k = 0.04;
    int corner_window = 5;
    double corner_rel_threshold = 0.2;
    double corner_removal_radius = 4.0;

    // Cluster filtering in the first extractor
    int min_cluster_px = 10;
    double max_aspect = 0.2; // minor/major PCA eigenvalue ratio

    // Line extension search
    double band_radius = 3.0;

    // Hough extractor
    int hough_votes = 20;
    double hough_rho_cluster = 10.0;     // px
    double hough_theta_cluster = 5.0;    // degrees
    double vicinity_radius = 40.0;       // px, endpoint plausibility circle

    // Combined approach
    double edge_cluster_eps = 15.0;      // (rho, theta*scale) space
    int candidate_samples = 10;          // extra endpoint candidates per side
    double candidate_sample_radius = 25.0;
    CostMaskSource cost_mask_source = CostMaskSource::extract;

    // Assembly. support_prune drops selected edges whose strongest member
    // support falls below this fraction of the scene maximum (0 disables;
    // only safe when true edges have comparable support, e.g. rhombi).
    // assembly_radius is the corner-acceptance distance; unlike
    // vicinity_radius it does not gate Hough endpoint plausibility.
    double support_prune = 0.0;
    double assembly_radius = 40.0;       // px

    // Consistency gate and fallback
    double fallback_iou = 0.75;
    int max_fallback_points = 20;

    std::uint64_t master_seed = 1;

    /// Throws InvalidArgument when a knob is out of its domain.
    void validate() const;
};

} // namespace planeref
