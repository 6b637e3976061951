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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planeref/config.hpp"
#include "planeref/raster.hpp"

namespace planeref {

enum class Difficulty { easy, medium, hard };

Difficulty difficulty_from_string(const std::string& s);
std::string to_string(Difficulty d);

struct SceneRecord {
    std::string id;
    Difficulty difficulty = Difficulty::medium;
    std::string image_path;
    std::vector<std::string> prior_paths;
    std::vector<RasterMask> priors;
    std::vector<RasterMask> gt;
    // Precomputed edge maps by detector name, e.g. "dexi_lr", "dexi_fr".
    std::map<std::string, std::string> edge_paths;
    int width = 0;
    int height = 0;
};

/// Reads a manifest JSON ({"scenes": [...]}) and loads every referenced
/// raster. Ground truth comes either from mask PNGs ("gt_masks") or a VGG
/// Image Annotator polygon export ("gt_via"), rasterized on load. Errors
/// carry the offending JSON path or file path.
std::vector<SceneRecord> load_dataset(const std::string& manifest_path);

/// Per-image score: greedy one-to-one matching by descending IoU, unmatched
/// ground-truth masks score 0, mean over ground-truth masks.
double match_and_score(std::span<const RasterMask> predicted, std::span<const RasterMask> gt);

struct MethodSpec {
    enum class Kind {
        prior,        // prior masks scored as-is
        fallback,     // fallback polygon of each prior
        refine_edges, // refinement with a precomputed edge map (edge_key)
        refine_canny, // refinement with Adaptive Canny on the scene image
    };

    std::string name;
    Kind kind = Kind::prior;
    std::string edge_key; // for refine_edges
};

struct EvalResult {
    std::vector<std::string> method_names;
    std::vector<std::string> scene_ids;
    std::vector<Difficulty> scene_difficulty;
    // scores[scene][method]; nullopt when the scene was skipped for that method
    std::vector<std::vector<std::optional<double>>> scores;
    std::vector<std::string> warnings;

    bool any_skipped() const;
    /// Mean over scenes of one difficulty (nullopt when no scene has a
    /// score), and the unweighted mean over all scenes.
    std::optional<double> category_mean(std::size_t method, Difficulty d) const;
    std::optional<double> overall_mean(std::size_t method) const;
};

/// Scores every method on every scene. Per-scene failures are recorded as
/// warnings and the scene is skipped for that method.
EvalResult run_benchmark(const std::vector<SceneRecord>& dataset,
                         std::span<const MethodSpec> methods, const RefineConfig& cfg);

/// Aligned text table: one column per method, rows Easy/Medium/Hard/All.
std::string render_table(const EvalResult& result);

/// Same layout as CSV with raw fractions.
std::string to_csv(const EvalResult& result);

} // namespace planeref
