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

#include "planeref/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "planeref/edges.hpp"
#include "planeref/geom.hpp"
#include "planeref/refine.hpp"

namespace planeref {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kEdgeStrengthThreshold = 128;

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

void adopt_dims(SceneRecord& scene, const RasterMask& m, const std::string& path) {
    if (scene.width == 0) {
        scene.width = m.width;
        scene.height = m.height;
    } else if (m.width != scene.width || m.height != scene.height) {
        throw DimensionMismatch(path + ": size differs from the rest of scene " + scene.id);
    }
}

// Rasterizes the polygon regions of a VGG Image Annotator export. Region
// order follows the document's (alphabetical) image-entry order.
std::vector<RasterMask> load_via_masks(const std::string& path, int width, int height) {
    json doc = parse_json_file(path);
    if (doc.contains("_via_img_metadata")) doc = doc["_via_img_metadata"];

    std::vector<RasterMask> masks;
    for (const auto& [key, entry] : doc.items()) {
        if (!entry.is_object() || !entry.contains("regions")) continue;
        for (const auto& region : entry["regions"]) {
            const auto& shape = region.at("shape_attributes");
            const std::string name = shape.at("name");
            Polygon poly;
            if (name == "polygon" || name == "polyline") {
                const auto& xs = shape.at("all_points_x");
                const auto& ys = shape.at("all_points_y");
                if (xs.size() != ys.size() || xs.size() < 3)
                    throw InvalidArgument(path + ": bad polygon in region of " + key);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    poly.vertices.push_back({xs[i].get<double>(), ys[i].get<double>()});
            } else if (name == "rect") {
                const double x = shape.at("x").get<double>();
                const double y = shape.at("y").get<double>();
                const double w = shape.at("width").get<double>();
                const double h = shape.at("height").get<double>();
                poly.vertices = {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}};
            } else {
                throw InvalidArgument(path + ": unsupported region shape '" + name + "'");
            }
            masks.push_back(rasterize(poly, width, height));
        }
    }
    if (masks.empty()) throw InvalidArgument(path + ": no regions found");
    return masks;
}

} // namespace

Difficulty difficulty_from_string(const std::string& s) {
    std::string t;
    for (const char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "easy") return Difficulty::easy;
    if (t == "medium") return Difficulty::medium;
    if (t == "hard") return Difficulty::hard;
    throw InvalidArgument("unknown difficulty '" + s + "'");
}

std::string to_string(Difficulty d) {
    switch (d) {
        case Difficulty::easy: return "easy";
        case Difficulty::medium: return "medium";
        case Difficulty::hard: return "hard";
    }
    return "medium";
}

std::vector<SceneRecord> load_dataset(const std::string& manifest_path) {
    const json doc = parse_json_file(manifest_path);
    if (!doc.contains("scenes") || !doc["scenes"].is_array())
        throw InvalidArgument(manifest_path + ": missing \"scenes\" array");
    const fs::path base = fs::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).string(); };

    std::vector<SceneRecord> scenes;
    for (const auto& s : doc["scenes"]) {
        SceneRecord scene;
        scene.id = s.at("id").get<std::string>();
        if (s.contains("difficulty"))
            scene.difficulty = difficulty_from_string(s["difficulty"].get<std::string>());
        if (s.contains("width")) scene.width = s["width"].get<int>();
        if (s.contains("height")) scene.height = s["height"].get<int>();
        if (s.contains("image")) scene.image_path = resolve(s["image"].get<std::string>());

        if (s.contains("priors"))
            for (const auto& p : s["priors"]) {
                const std::string path = resolve(p.get<std::string>());
                scene.prior_paths.push_back(path);
                scene.priors.push_back(load_mask(path));
                adopt_dims(scene, scene.priors.back(), path);
            }

        if (s.contains("gt_masks")) {
            for (const auto& p : s["gt_masks"]) {
                const std::string path = resolve(p.get<std::string>());
                scene.gt.push_back(load_mask(path));
                adopt_dims(scene, scene.gt.back(), path);
            }
        } else if (s.contains("gt_via")) {
            if (scene.width == 0)
                throw InvalidArgument(scene.id +
                                      ": polygon ground truth needs priors or explicit width/height");
            scene.gt = load_via_masks(resolve(s["gt_via"].get<std::string>()), scene.width,
                                      scene.height);
        } else {
            throw InvalidArgument(scene.id + ": needs \"gt_masks\" or \"gt_via\"");
        }

        if (s.contains("edges"))
            for (const auto& [name, path] : s["edges"].items())
                scene.edge_paths[name] = resolve(path.get<std::string>());

        scenes.push_back(std::move(scene));
    }
    return scenes;
}

double match_and_score(std::span<const RasterMask> predicted, std::span<const RasterMask> gt) {
    if (gt.empty()) throw InvalidArgument("match_and_score: no ground-truth masks");

    struct Pair {
        double iou;
        std::size_t g, p;
    };
    std::vector<Pair> pairs;
    for (std::size_t g = 0; g < gt.size(); ++g)
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            const double iou = mask_iou(gt[g], predicted[p]);
            if (iou > 0) pairs.push_back({iou, g, p});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.g != b.g) return a.g < b.g;
        return a.p < b.p;
    });

    std::vector<char> g_used(gt.size(), 0), p_used(predicted.size(), 0);
    double total = 0;
    for (const auto& pr : pairs) {
        if (g_used[pr.g] || p_used[pr.p]) continue;
        g_used[pr.g] = p_used[pr.p] = 1;
        total += pr.iou;
    }
    return total / static_cast<double>(gt.size());
}

bool EvalResult::any_skipped() const {
    for (const auto& row : scores)
        for (const auto& s : row)
            if (!s.has_value()) return true;
    return false;
}

std::optional<double> EvalResult::category_mean(std::size_t method, Difficulty d) const {
    double total = 0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < scores.size(); ++s) {
        if (scene_difficulty[s] != d || !scores[s][method]) continue;
        total += *scores[s][method];
        ++n;
    }
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

std::optional<double> EvalResult::overall_mean(std::size_t method) const {
    double total = 0;
    std::size_t n = 0;
    for (const auto& row : scores)
        if (row[method]) {
            total += *row[method];
            ++n;
        }
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

EvalResult run_benchmark(const std::vector<SceneRecord>& dataset,
                         std::span<const MethodSpec> methods, const RefineConfig& cfg) {
    cfg.validate();
    EvalResult result;
    for (const auto& m : methods) result.method_names.push_back(m.name);

    for (const auto& scene : dataset) {
        result.scene_ids.push_back(scene.id);
        result.scene_difficulty.push_back(scene.difficulty);
        std::vector<std::optional<double>> row(methods.size());

        // Shared per-scene caches so several methods reuse one edge map.
        std::map<std::string, EdgeMap> edge_cache;
        std::optional<EdgeMap> canny_cache;
        auto edges_for = [&](const MethodSpec& m) -> const EdgeMap& {
            if (m.kind == MethodSpec::Kind::refine_edges) {
                auto it = edge_cache.find(m.edge_key);
                if (it != edge_cache.end()) return it->second;
                const auto path = scene.edge_paths.find(m.edge_key);
                if (path == scene.edge_paths.end())
                    throw InvalidArgument("scene has no edge map '" + m.edge_key + "'");
                EdgeMap em = ingest_edge_map(path->second, kEdgeStrengthThreshold,
                                             std::pair{scene.width, scene.height});
                return edge_cache.emplace(m.edge_key, std::move(em)).first->second;
            }
            if (!canny_cache) {
                if (scene.image_path.empty())
                    throw InvalidArgument("scene has no image for edge detection");
                GrayImage img = load_gray(scene.image_path);
                if (img.width != scene.width || img.height != scene.height)
                    img = resize_bilinear(img, scene.width, scene.height);
                canny_cache = adaptive_canny(img);
            }
            return *canny_cache;
        };

        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const MethodSpec& m = methods[mi];
            try {
                if (scene.priors.empty()) throw InvalidArgument("scene has no prior masks");
                std::vector<RasterMask> predicted;
                switch (m.kind) {
                    case MethodSpec::Kind::prior:
                        predicted = scene.priors;
                        break;
                    case MethodSpec::Kind::fallback:
                        for (const auto& prior : scene.priors)
                            predicted.push_back(rasterize(
                                fallback_mask(prior, cfg.max_fallback_points), scene.width,
                                scene.height));
                        break;
                    case MethodSpec::Kind::refine_edges:
                    case MethodSpec::Kind::refine_canny: {
                        const EdgeMap& em = edges_for(m);
                        for (std::size_t i = 0; i < scene.priors.size(); ++i)
                            predicted.push_back(
                                refine_mask(scene.priors[i], em, cfg, static_cast<int>(i))
                                    .refined_mask);
                        break;
                    }
                }
                row[mi] = match_and_score(predicted, scene.gt);
            } catch (const Error& e) {
                result.warnings.push_back(scene.id + " / " + m.name + ": " + e.what());
            }
        }
        result.scores.push_back(std::move(row));
    }
    return result;
}

namespace {

std::string format_cell(const std::optional<double>& mean) {
    if (!mean) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *mean * 100.0);
    return buf;
}

} // namespace

std::string render_table(const EvalResult& result) {
    static const Difficulty cats[] = {Difficulty::easy, Difficulty::medium, Difficulty::hard};
    const std::size_t nm = result.method_names.size();

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Category"});
    for (const auto& n : result.method_names) rows.back().push_back(n);
    for (const Difficulty d : cats) {
        std::string label = to_string(d);
        label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
        rows.push_back({label});
        for (std::size_t m = 0; m < nm; ++m)
            rows.back().push_back(format_cell(result.category_mean(m, d)));
    }
    rows.push_back({"All"});
    for (std::size_t m = 0; m < nm; ++m)
        rows.back().push_back(format_cell(result.overall_mean(m)));

    std::vector<std::size_t> widths(nm + 1, 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());

    std::ostringstream out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) out << "  ";
            const auto& cell = rows[r][c];
            if (c == 0)
                out << cell << std::string(widths[c] - cell.size(), ' ');
            else
                out << std::string(widths[c] - cell.size(), ' ') << cell;
        }
        out << '\n';
        if (r == 0) {
            std::size_t line = 0;
            for (const auto w : widths) line += w;
            out << std::string(line + 2 * nm, '-') << '\n';
        }
    }
    if (result.any_skipped())
        out << "(some scene/method pairs were skipped; rerun with --verbose for details)\n";
    return out.str();
}

std::string to_csv(const EvalResult& result) {
    static const Difficulty cats[] = {Difficulty::easy, Difficulty::medium, Difficulty::hard};
    std::ostringstream out;
    out << "category";
    for (const auto& n : result.method_names) out << ',' << n;
    out << '\n';

    auto emit = [&](const std::string& label, auto mean_of) {
        out << label;
        for (std::size_t m = 0; m < result.method_names.size(); ++m) {
            out << ',';
            const auto v = mean_of(m);
            if (v) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.6f", *v);
                out << buf;
            }
        }
        out << '\n';
    };
    for (const Difficulty d : cats)
        emit(to_string(d), [&](std::size_t m) { return result.category_mean(m, d); });
    emit("all", [&](std::size_t m) { return result.overall_mean(m); });
    return out.str();
}

} // namespace planeref
