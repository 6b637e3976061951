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

#include "planeref/config.hpp"

namespace planeref {

void RefineConfig::validate() const {
    auto fail = [](const char* what) { throw InvalidArgument(what); };

    if (widen_radius < 1) fail("widen_radius must be >= 1");
    if (dbscan_eps <= 0) fail("dbscan_eps must be positive");
    if (dbscan_min_pts < 1) fail("dbscan_min_pts must be >= 1");
    if (ransac_tol <= 0) fail("ransac_tol must be positive");
    if (ransac_iterations < 1) fail("ransac_iterations must be >= 1");
    if (corner_k <= 0 || corner_k >= 0.25) fail("corner_k must be in (0, 0.25)");
    if (corner_window < 3 || corner_window % 2 == 0) fail("corner_window must be odd and >= 3");
    if (corner_rel_threshold < 0 || corner_rel_threshold > 1)
        fail("corner_rel_threshold must be in [0, 1]");
    if (corner_removal_radius < 0) fail("corner_removal_radius must be >= 0");
    if (min_cluster_px < 2) fail("min_cluster_px must be >= 2");
    if (max_aspect <= 0 || max_aspect > 1) fail("max_aspect must be in (0, 1]");
    if (band_radius <= 0) fail("band_radius must be positive");
    if (hough_votes < 1) fail("hough_votes must be >= 1");
    if (hough_rho_cluster <= 0) fail("hough_rho_cluster must be positive");
    if (hough_theta_cluster <= 0) fail("hough_theta_cluster must be positive");
    if (vicinity_radius <= 0) fail("vicinity_radius must be positive");
    if (edge_cluster_eps <= 0) fail("edge_cluster_eps must be positive");
    if (candidate_samples < 0) fail("candidate_samples must be >= 0");
    if (candidate_sample_radius <= 0) fail("candidate_sample_radius must be positive");
    if (support_prune < 0 || support_prune > 1) fail("support_prune must be in [0, 1]");
    if (assembly_radius <= 0) fail("assembly_radius must be positive");
    if (fallback_iou < 0 || fallback_iou > 1) fail("fallback_iou must be in [0, 1]");
    if (max_fallback_points < 3) fail("max_fallback_points must be >= 3");
}

} // namespace planeref
