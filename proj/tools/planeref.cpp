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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "planeref/edges.hpp"
#include "planeref/eval.hpp"
#include "planeref/refine.hpp"

namespace fs = std::filesystem;
using namespace planeref;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
    RefineConfig cfg;
    int jobs = 1;
};

// Every pipeline knob doubles as a config-file key (CLI11 INI format), so a
// run is reproducible from one file.
void add_pipeline_options(CLI::App* cmd, CliOptions& opt) {
    cmd->set_config("--config", "", "read options from an INI file");
    auto& cfg = opt.cfg;
    cmd->add_option("--widen-radius", cfg.widen_radius, "contour band half-width (px)")
        ->capture_default_str();
    cmd->add_option("--dbscan-eps", cfg.dbscan_eps, "pixel clustering radius")
        ->capture_default_str();
    cmd->add_option("--dbscan-min-pts", cfg.dbscan_min_pts, "pixel clustering density")
        ->capture_default_str();
    cmd->add_option("--ransac-tol", cfg.ransac_tol, "line inlier tolerance (px)")
        ->capture_default_str();
    cmd->add_option("--ransac-iterations", cfg.ransac_iterations, "line fitting draws")
        ->capture_default_str();
    cmd->add_option("--corner-k", cfg.corner_k, "corner response k")->capture_default_str();
    cmd->add_option("--corner-window", cfg.corner_window, "corner window size (odd)")
        ->capture_default_str();
    cmd->add_option("--corner-rel-threshold", cfg.corner_rel_threshold,
                    "corner response cutoff relative to the maximum")
        ->capture_default_str();
    cmd->add_option("--corner-removal-radius", cfg.corner_removal_radius,
                    "radius cleared around each corner before clustering (px)")
        ->capture_default_str();
    cmd->add_option("--min-cluster-px", cfg.min_cluster_px, "smallest usable pixel cluster")
        ->capture_default_str();
    cmd->add_option("--max-aspect", cfg.max_aspect, "blob rejection: minor/major deviation ratio")
        ->capture_default_str();
    cmd->add_option("--band-radius", cfg.band_radius, "extension search band half-width (px)")
        ->capture_default_str();
    cmd->add_option("--hough-votes", cfg.hough_votes, "accumulator peak threshold")
        ->capture_default_str();
    cmd->add_option("--hough-rho-cluster", cfg.hough_rho_cluster, "peak merge radius, rho (px)")
        ->capture_default_str();
    cmd->add_option("--hough-theta-cluster", cfg.hough_theta_cluster,
                    "peak merge radius, theta (deg)")
        ->capture_default_str();
    cmd->add_option("--vicinity-radius", cfg.vicinity_radius,
                    "endpoint plausibility radius (px)")
        ->capture_default_str();
    cmd->add_option("--edge-cluster-eps", cfg.edge_cluster_eps,
                    "segment grouping radius in (rho, theta) space")
        ->capture_default_str();
    cmd->add_option("--candidate-samples", cfg.candidate_samples,
                    "extra endpoint candidates sampled per side")
        ->capture_default_str();
    cmd->add_option("--candidate-sample-radius", cfg.candidate_sample_radius,
                    "sampling radius around each endpoint centroid (px)")
        ->capture_default_str();
    cmd->add_option("--cost-mask-source", [&cfg](const CLI::results_t& res) {
            if (res[0] == "extract") cfg.cost_mask_source = CostMaskSource::extract;
            else if (res[0] == "prior") cfg.cost_mask_source = CostMaskSource::prior;
            else return false;
            return true;
        }, "raster the endpoint cost overlaps against: extract|prior")
        ->default_str("extract");
    cmd->add_option("--support-prune", cfg.support_prune,
                    "drop edges below this fraction of the max support (0 = off)")
        ->capture_default_str();
    cmd->add_option("--assembly-radius", cfg.assembly_radius,
                    "corner acceptance distance during assembly (px)")
        ->capture_default_str();
    cmd->add_option("--fallback-iou", cfg.fallback_iou,
                    "consistency gate: keep refined mask only at this IoU or above")
        ->capture_default_str();
    cmd->add_option("--max-fallback-points", cfg.max_fallback_points,
                    "vertex budget of the fallback polygon")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.master_seed, "master random seed")->capture_default_str();
    cmd->add_option("--jobs", opt.jobs, "worker threads")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
}

// This CLI11 build never reads a config attached to a subcommand during the
// parse itself, so feed the file through the stream interface afterwards.
// Options already set on the command line keep precedence.
void apply_config_file(CLI::App* cmd) {
    const CLI::Option* opt = cmd->get_config_ptr();
    if (opt == nullptr || opt->count() == 0) return;
    const auto path = opt->as<std::string>();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    try {
        cmd->parse_from_stream(in);
    } catch (const CLI::ParseError& e) {
        throw InvalidArgument("config file " + path + ": " + e.what());
    }
}

void apply_jobs(int jobs) {
#ifdef _OPENMP
    omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

std::vector<std::string> sorted_pngs(const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

void draw_contour(std::vector<std::uint8_t>& rgb, int w, int h, const RasterMask& mask,
                  std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const EdgeMap outline = mask_contour(mask);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (outline.get(x, y)) {
                const std::size_t i = 3 * (static_cast<std::size_t>(y) * w + x);
                rgb[i] = r;
                rgb[i + 1] = g;
                rgb[i + 2] = b;
            }
}

void draw_polygon(std::vector<std::uint8_t>& rgb, int w, int h, const Polygon& poly,
                  std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto px = line_pixels(poly.vertices[i], poly.vertices[(i + 1) % n]);
        for (const auto& [x, y] : px) {
            if (x < 0 || x >= w || y < 0 || y >= h) continue;
            const std::size_t j = 3 * (static_cast<std::size_t>(y) * w + x);
            rgb[j] = r;
            rgb[j + 1] = g;
            rgb[j + 2] = b;
        }
    }
}

std::vector<std::uint8_t> gray_to_rgb(const GrayImage& img) {
    std::vector<std::uint8_t> rgb(img.data.size() * 3);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.data[i];
    return rgb;
}

Polygon load_polygon_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
    if (j.contains("polygon")) j = j["polygon"];
    Polygon poly;
    for (const auto& v : j.at("vertices"))
        poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return poly;
}

// --- edges ---------------------------------------------------------------

int cmd_edges(const std::string& input, const std::string& out, bool external,
              int threshold, bool resized, int rw, int rh, double sigma, double low_ratio) {
    if (external) {
        std::optional<std::pair<int, int>> resize;
        if (resized) resize = {rw, rh};
        save_edge_map(ingest_edge_map(input, threshold, resize), out);
    } else {
        CannyParams params;
        params.sigma = sigma;
        params.low_ratio = low_ratio;
        save_edge_map(adaptive_canny(load_gray(input), params), out);
    }
    return kExitOk;
}

// --- refine --------------------------------------------------------------

int cmd_refine(const std::string& image, const std::string& edges_path,
               const std::string& priors_dir, const std::string& out_dir,
               const std::string& gt_dir, const std::string& overlay_path,
               const CliOptions& opt) {
    opt.cfg.validate();
    if (image.empty() && edges_path.empty())
        throw InvalidArgument("refine needs --image or --edges");

    std::optional<GrayImage> image_px;
    EdgeMap edges;
    if (!edges_path.empty()) {
        edges = load_edge_map(edges_path);
        if (!image.empty()) image_px = load_gray(image);
    } else {
        image_px = load_gray(image);
        edges = adaptive_canny(*image_px);
    }

    const std::vector<std::string> priors = sorted_pngs(priors_dir);
    if (priors.empty()) {
        std::cerr << "warning: no prior masks (*.png) in " << priors_dir << "\n";
        return kExitOk;
    }
    fs::create_directories(out_dir);

    const int n = static_cast<int>(priors.size());
    std::vector<RefineReport> reports(n);
    std::vector<std::string> failures(n);
    apply_jobs(opt.jobs);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            const RasterMask prior = load_mask(priors[i]);
            reports[i] = refine_mask(prior, edges, opt.cfg, i);
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    }

    bool partial = false;
    std::vector<Polygon> drawn;
    for (int i = 0; i < n; ++i) {
        const std::string stem = fs::path(priors[i]).stem().string();
        if (!failures[i].empty()) {
            std::cerr << "warning: " << priors[i] << ": " << failures[i] << "\n";
            partial = true;
            continue;
        }
        save_mask(reports[i].refined_mask, (fs::path(out_dir) / (stem + "_refined.png")).string());
        std::ofstream json_out(fs::path(out_dir) / (stem + "_report.json"));
        json_out << report_to_json(reports[i]) << "\n";
        drawn.push_back(reports[i].refined);
    }

    if (!overlay_path.empty()) {
        if (!image_px)
            throw InvalidArgument("--overlay needs --image for the background");
        auto rgb = gray_to_rgb(*image_px);
        if (!gt_dir.empty())
            for (const auto& path : sorted_pngs(gt_dir))
                draw_contour(rgb, image_px->width, image_px->height, load_mask(path), 0, 200, 0);
        for (const auto& poly : drawn)
            draw_polygon(rgb, image_px->width, image_px->height, poly, 230, 40, 40);
        save_rgb(rgb, image_px->width, image_px->height, overlay_path);
    }
    return partial ? kExitPartial : kExitOk;
}

// --- eval ----------------------------------------------------------------

std::vector<MethodSpec> parse_methods(const std::vector<std::string>& tokens) {
    std::vector<MethodSpec> out;
    for (const auto& t : tokens) {
        MethodSpec m;
        m.name = t;
        if (t == "prior") {
            m.kind = MethodSpec::Kind::prior;
        } else if (t == "fallback") {
            m.kind = MethodSpec::Kind::fallback;
        } else if (t == "canny") {
            m.kind = MethodSpec::Kind::refine_canny;
        } else if (t.rfind("refine:", 0) == 0 && t.size() > 7) {
            m.kind = MethodSpec::Kind::refine_edges;
            m.edge_key = t.substr(7);
        } else {
            throw InvalidArgument("unknown method '" + t +
                                  "' (expected prior|fallback|canny|refine:<edge-key>)");
        }
        out.push_back(std::move(m));
    }
    return out;
}

int cmd_eval(const std::string& manifest, const std::vector<std::string>& method_tokens,
             const std::string& csv_path, const std::string& report_dir, bool verbose,
             const CliOptions& opt) {
    const auto methods = parse_methods(method_tokens);
    const auto dataset = load_dataset(manifest);
    apply_jobs(opt.jobs);
    const EvalResult result = run_benchmark(dataset, methods, opt.cfg);

    std::cout << render_table(result);
    if (verbose)
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw IoError("cannot write " + csv_path);
        out << to_csv(result);
    }
    if (!report_dir.empty()) {
        fs::create_directories(report_dir);
        for (std::size_t s = 0; s < result.scene_ids.size(); ++s) {
            nlohmann::json j;
            j["id"] = result.scene_ids[s];
            j["difficulty"] = to_string(result.scene_difficulty[s]);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                if (result.scores[s][m])
                    j["scores"][methods[m].name] = *result.scores[s][m];
                else
                    j["scores"][methods[m].name] = nullptr;
            }
            std::ofstream out(fs::path(report_dir) / (result.scene_ids[s] + ".json"));
            out << j.dump(2) << "\n";
        }
    }
    return result.any_skipped() ? kExitPartial : kExitOk;
}

// --- render --------------------------------------------------------------

int cmd_render(const std::string& image, const std::string& out,
               const std::vector<std::string>& masks, const std::vector<std::string>& gts,
               const std::vector<std::string>& polygons) {
    const GrayImage img = load_gray(image);
    auto rgb = gray_to_rgb(img);
    for (const auto& path : gts)
        draw_contour(rgb, img.width, img.height, load_mask(path), 0, 200, 0);
    for (const auto& path : masks)
        draw_contour(rgb, img.width, img.height, load_mask(path), 60, 120, 255);
    for (const auto& path : polygons)
        draw_polygon(rgb, img.width, img.height, load_polygon_json(path), 230, 40, 40);
    save_rgb(rgb, img.width, img.height, out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary refinement for plane segmentation masks"};
    app.require_subcommand(1);

    // edges
    auto* edges = app.add_subcommand("edges", "detect or ingest an edge map");
    std::string e_input, e_out;
    bool e_external = false, e_resized = false;
    int e_threshold = 128, e_rw = 640, e_rh = 480;
    double e_sigma = 1.4, e_low = 0.5;
    edges->add_option("-i,--input", e_input, "input PNG (image or edge strengths)")->required();
    edges->add_option("-o,--output", e_out, "output edge map PNG")->required();
    edges->add_flag("--external", e_external, "input holds edge strengths, binarize only");
    edges->add_option("--threshold", e_threshold, "strength cutoff for --external")
        ->check(CLI::Range(0, 255))
        ->capture_default_str();
    edges->add_flag("--resize", e_resized, "resize strengths to the target size first");
    edges->add_option("--target-width", e_rw, "resize target width")->capture_default_str();
    edges->add_option("--target-height", e_rh, "resize target height")->capture_default_str();
    edges->add_option("--sigma", e_sigma, "blur before gradients")->capture_default_str();
    edges->add_option("--low-ratio", e_low, "hysteresis low/high ratio")->capture_default_str();

    // refine
    auto* refine = app.add_subcommand("refine", "refine prior masks against an edge map");
    std::string r_image, r_edges, r_priors, r_out, r_gt, r_overlay;
    CliOptions r_opt;
    refine->add_option("--image", r_image, "scene image PNG (enables edge detection)");
    refine->add_option("--edges", r_edges, "binary edge map PNG (skips detection)");
    refine->add_option("--priors", r_priors, "directory of prior mask PNGs")->required();
    refine->add_option("--out", r_out, "output directory")->required();
    refine->add_option("--gt", r_gt, "directory of ground-truth masks for the overlay");
    refine->add_option("--overlay", r_overlay, "write a contour overlay PNG here");
    add_pipeline_options(refine, r_opt);

    // eval
    auto* eval = app.add_subcommand("eval", "score methods against ground truth");
    std::string v_manifest, v_csv, v_reports;
    std::vector<std::string> v_methods{"prior", "fallback", "canny"};
    bool v_verbose = false;
    CliOptions v_opt;
    eval->add_option("--manifest", v_manifest, "dataset manifest JSON")->required();
    eval->add_option("--methods", v_methods,
                     "methods to score: prior|fallback|canny|refine:<edge-key>")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--csv", v_csv, "write scores as CSV here");
    eval->add_option("--reports", v_reports, "write per-scene JSON reports here");
    eval->add_flag("--verbose", v_verbose, "print per-scene warnings");
    add_pipeline_options(eval, v_opt);

    // render
    auto* render = app.add_subcommand("render", "overlay masks and polygons on an image");
    std::string n_image, n_out;
    std::vector<std::string> n_masks, n_gts, n_polys;
    render->add_option("--image", n_image, "background image PNG")->required();
    render->add_option("--out", n_out, "output PNG")->required();
    render->add_option("--mask", n_masks, "mask PNG to outline (repeatable)");
    render->add_option("--gt", n_gts, "ground-truth mask PNG to outline (repeatable)");
    render->add_option("--polygon", n_polys, "polygon JSON to outline (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Fold CLI11's exit-code zoo into the documented contract: help and
        // version stay 0, every bad command line is a usage error.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(edges))
            return cmd_edges(e_input, e_out, e_external, e_threshold, e_resized, e_rw, e_rh,
                             e_sigma, e_low);
        if (app.got_subcommand(refine)) {
            apply_config_file(refine);
            return cmd_refine(r_image, r_edges, r_priors, r_out, r_gt, r_overlay, r_opt);
        }
        if (app.got_subcommand(eval)) {
            apply_config_file(eval);
            return cmd_eval(v_manifest, v_methods, v_csv, v_reports, v_verbose, v_opt);
        }
        if (app.got_subcommand(render))
            return cmd_render(n_image, n_out, n_masks, n_gts, n_polys);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const MalformedImage& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
