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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "planeref/eval.hpp"
#include "planeref/geom.hpp"
#include "synthscene.hpp"

using namespace planeref;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() /
               ("planeref_eval_" + std::to_string(rd() % 1000000));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

RasterMask rect_mask(int w, int h, int x0, int x1, int y0, int y1) {
    RasterMask m(w, h);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m.set(x, y, true);
    return m;
}

} // namespace

TEST_CASE("match_and_score pairs masks greedily by IoU") {
    SUBCASE("identical sets score 1") {
        const std::vector<RasterMask> gt{rect_mask(20, 20, 0, 10, 0, 10),
                                         rect_mask(20, 20, 10, 20, 0, 10)};
        CHECK(match_and_score(gt, gt) == doctest::Approx(1));
    }
    SUBCASE("a missed ground-truth mask scores 0") {
        const std::vector<RasterMask> gt{rect_mask(20, 20, 0, 10, 0, 10),
                                         rect_mask(20, 20, 10, 20, 0, 10)};
        const std::vector<RasterMask> pred{gt[0]};
        CHECK(match_and_score(pred, gt) == doctest::Approx(0.5));
    }
    SUBCASE("greedy matching takes the strongest pair first") {
        const std::vector<RasterMask> gt{rect_mask(30, 10, 0, 10, 0, 10),
                                         rect_mask(30, 10, 10, 20, 0, 10)};
        // p0 overlaps both ground truths, p1 is a perfect copy of gt0. The
        // best pair (gt0, p1) wins, leaving p0 for gt1 at IoU 0.1.
        const std::vector<RasterMask> pred{rect_mask(30, 10, 0, 12, 0, 10),
                                           rect_mask(30, 10, 0, 10, 0, 10)};
        CHECK(match_and_score(pred, gt) == doctest::Approx((1.0 + 20.0 / 200.0) / 2.0));
    }
    SUBCASE("prediction order does not matter") {
        const std::vector<RasterMask> gt{rect_mask(30, 10, 0, 10, 0, 10),
                                         rect_mask(30, 10, 10, 20, 0, 10)};
        const std::vector<RasterMask> fwd{rect_mask(30, 10, 0, 12, 0, 10),
                                          rect_mask(30, 10, 0, 10, 0, 10)};
        const std::vector<RasterMask> rev{fwd[1], fwd[0]};
        CHECK(match_and_score(fwd, gt) == match_and_score(rev, gt));
    }
    SUBCASE("each prediction is used at most once") {
        const std::vector<RasterMask> gt{rect_mask(20, 20, 0, 10, 0, 10),
                                         rect_mask(20, 20, 0, 10, 0, 10)};
        const std::vector<RasterMask> pred{gt[0]};
        CHECK(match_and_score(pred, gt) == doctest::Approx(0.5));
    }
    SUBCASE("spare disjoint predictions are harmless") {
        const std::vector<RasterMask> gt{rect_mask(20, 20, 0, 10, 0, 10)};
        const std::vector<RasterMask> pred{gt[0], rect_mask(20, 20, 12, 18, 12, 18)};
        CHECK(match_and_score(pred, gt) == doctest::Approx(1));
    }
    SUBCASE("empty ground truth is rejected") {
        const std::vector<RasterMask> pred{rect_mask(20, 20, 0, 10, 0, 10)};
        CHECK_THROWS_AS(match_and_score(pred, {}), InvalidArgument);
    }
}

TEST_CASE("load_dataset reads a manifest with mask ground truth") {
    TempDir tmp;
    const RasterMask prior = rect_mask(64, 48, 10, 30, 10, 30);
    const RasterMask gt = rect_mask(64, 48, 8, 32, 8, 32);
    EdgeMap edges(64, 48);
    for (int x = 8; x < 32; ++x) edges.set(x, 8, true);
    GrayImage img(64, 48);
    save_gray(img, tmp.file("image.png"));
    save_mask(prior, tmp.file("prior0.png"));
    save_mask(gt, tmp.file("gt0.png"));
    save_edge_map(edges, tmp.file("edges.png"));
    write_text(tmp.file("manifest.json"), R"({"scenes": [{
        "id": "s0", "difficulty": "easy", "image": "image.png",
        "priors": ["prior0.png"], "gt_masks": ["gt0.png"],
        "edges": {"ext": "edges.png"}}]})");

    const auto scenes = load_dataset(tmp.file("manifest.json"));
    REQUIRE(scenes.size() == 1);
    CHECK(scenes[0].id == "s0");
    CHECK(scenes[0].difficulty == Difficulty::easy);
    CHECK(scenes[0].width == 64);
    CHECK(scenes[0].height == 48);
    REQUIRE(scenes[0].priors.size() == 1);
    REQUIRE(scenes[0].gt.size() == 1);
    CHECK(scenes[0].priors[0].bits == prior.bits);
    CHECK(scenes[0].gt[0].bits == gt.bits);
    REQUIRE(scenes[0].edge_paths.count("ext") == 1);
    CHECK(fs::exists(scenes[0].edge_paths.at("ext")));
    CHECK(fs::exists(scenes[0].image_path));
}

TEST_CASE("load_dataset rasterizes polygon ground truth exports") {
    TempDir tmp;
    save_mask(rect_mask(80, 60, 0, 10, 0, 10), tmp.file("prior0.png"));
    write_text(tmp.file("via.json"), R"({"_via_img_metadata": {"img1.png": {
        "regions": [
          {"shape_attributes": {"name": "polygon",
            "all_points_x": [20, 60, 40], "all_points_y": [10, 10, 50]}},
          {"shape_attributes": {"name": "rect",
            "x": 5, "y": 40, "width": 20, "height": 15}}
        ]}}})");
    write_text(tmp.file("manifest.json"), R"({"scenes": [{
        "id": "v0", "priors": ["prior0.png"], "gt_via": "via.json"}]})");

    const auto scenes = load_dataset(tmp.file("manifest.json"));
    REQUIRE(scenes.size() == 1);
    REQUIRE(scenes[0].gt.size() == 2);
    const Polygon tri{{{20, 10}, {60, 10}, {40, 50}}};
    const Polygon rect{{{5, 40}, {25, 40}, {25, 55}, {5, 55}}};
    CHECK(scenes[0].gt[0].bits == rasterize(tri, 80, 60).bits);
    CHECK(scenes[0].gt[1].bits == rasterize(rect, 80, 60).bits);
    CHECK(scenes[0].difficulty == Difficulty::medium); // default
}

TEST_CASE("load_dataset rejects malformed manifests") {
    TempDir tmp;
    save_mask(rect_mask(64, 48, 10, 30, 10, 30), tmp.file("p.png"));

    SUBCASE("missing scenes array") {
        write_text(tmp.file("m.json"), R"({"images": []})");
        CHECK_THROWS_AS(load_dataset(tmp.file("m.json")), InvalidArgument);
    }
    SUBCASE("unparseable JSON") {
        write_text(tmp.file("m.json"), "{scenes: oops");
        CHECK_THROWS_AS(load_dataset(tmp.file("m.json")), InvalidArgument);
    }
    SUBCASE("unknown difficulty") {
        write_text(tmp.file("m.json"),
                   R"({"scenes": [{"id": "x", "difficulty": "extreme",
                       "priors": ["p.png"], "gt_masks": ["p.png"]}]})");
        CHECK_THROWS_AS(load_dataset(tmp.file("m.json")), InvalidArgument);
    }
    SUBCASE("no ground truth names the scene") {
        write_text(tmp.file("m.json"),
                   R"({"scenes": [{"id": "sceneX", "priors": ["p.png"]}]})");
        try {
            load_dataset(tmp.file("m.json"));
            FAIL("expected InvalidArgument");
        } catch (const InvalidArgument& e) {
            CHECK(std::string(e.what()).find("sceneX") != std::string::npos);
        }
    }
    SUBCASE("polygon ground truth without any size source") {
        write_text(tmp.file("via.json"), R"({"img": {"regions": []}})");
        write_text(tmp.file("m.json"),
                   R"({"scenes": [{"id": "x", "gt_via": "via.json"}]})");
        CHECK_THROWS_AS(load_dataset(tmp.file("m.json")), InvalidArgument);
    }
    SUBCASE("missing raster carries its path") {
        write_text(tmp.file("m.json"),
                   R"({"scenes": [{"id": "x", "priors": ["absent.png"],
                       "gt_masks": ["p.png"]}]})");
        try {
            load_dataset(tmp.file("m.json"));
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("absent.png") != std::string::npos);
        }
    }
    SUBCASE("mixed raster sizes in one scene") {
        save_mask(rect_mask(32, 24, 0, 10, 0, 10), tmp.file("small.png"));
        write_text(tmp.file("m.json"),
                   R"({"scenes": [{"id": "x", "priors": ["p.png"],
                       "gt_masks": ["small.png"]}]})");
        CHECK_THROWS_AS(load_dataset(tmp.file("m.json")), DimensionMismatch);
    }
}

TEST_CASE("means aggregate by difficulty and skip absent cells") {
    EvalResult r;
    r.method_names = {"prior", "ours"};
    r.scene_ids = {"a", "b", "c"};
    r.scene_difficulty = {Difficulty::easy, Difficulty::easy, Difficulty::medium};
    r.scores = {{0.5, 0.6}, {0.7, std::nullopt}, {0.9, 0.8}};

    CHECK(*r.category_mean(0, Difficulty::easy) == doctest::Approx(0.6));
    CHECK(*r.category_mean(1, Difficulty::easy) == doctest::Approx(0.6));
    CHECK(*r.category_mean(0, Difficulty::medium) == doctest::Approx(0.9));
    CHECK_FALSE(r.category_mean(0, Difficulty::hard).has_value());
    CHECK(*r.overall_mean(0) == doctest::Approx(0.7));
    CHECK(*r.overall_mean(1) == doctest::Approx(0.7));
    CHECK(r.any_skipped());

    EvalResult full = r;
    full.scores[1][1] = 0.4;
    CHECK_FALSE(full.any_skipped());
}

TEST_CASE("the table and CSV expose one row per difficulty") {
    EvalResult r;
    r.method_names = {"prior", "ours"};
    r.scene_ids = {"a", "b", "c"};
    r.scene_difficulty = {Difficulty::easy, Difficulty::medium, Difficulty::hard};
    r.scores = {{0.5, 0.9}, {0.25, std::nullopt}, {1.0, 0.75}};

    const std::string table = render_table(r);
    for (const char* needle :
         {"Category", "prior", "ours", "Easy", "Medium", "Hard", "All", "50.00", "90.00",
          "25.00", "100.00", "75.00", "skipped"})
        CHECK_MESSAGE(table.find(needle) != std::string::npos, needle);
    CHECK(table.find("-\n") != std::string::npos); // the skipped medium cell

    const std::string csv = to_csv(r);
    CHECK(csv.find("category,prior,ours\n") == 0);
    CHECK(csv.find("easy,0.500000,0.900000") != std::string::npos);
    CHECK(csv.find("medium,0.250000,\n") != std::string::npos);
    CHECK(csv.find("hard,1.000000,0.750000") != std::string::npos);
    CHECK(csv.find("all,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("run_benchmark scores prior, fallback and refinement end to end") {
    TempDir tmp;
    std::string manifest = R"({"scenes": [)";
    for (int i = 0; i < 2; ++i) {
        const synth::Scene sc = synth::make_scene(101 + static_cast<std::uint64_t>(i));
        const std::string n = std::to_string(i);
        save_gray(sc.image, tmp.file("img" + n + ".png"));
        save_mask(sc.prior, tmp.file("prior" + n + ".png"));
        save_mask(sc.gt, tmp.file("gt" + n + ".png"));
        save_edge_map(sc.edges, tmp.file("edges" + n + ".png"));
        if (i) manifest += ",";
        manifest += R"({"id": "s)" + n + R"(", "difficulty": ")" +
                    (i ? "hard" : "easy") + R"(", "image": "img)" + n +
                    R"(.png", "priors": ["prior)" + n + R"(.png"], "gt_masks": ["gt)" + n +
                    R"(.png"], "edges": {"ext": "edges)" + n + R"(.png"}})";
    }
    manifest += "]}";
    write_text(tmp.file("manifest.json"), manifest);

    const auto dataset = load_dataset(tmp.file("manifest.json"));
    RefineConfig cfg;
    cfg.widen_radius = 12;
    cfg.support_prune = 0.6;
    cfg.assembly_radius = 100.0;
    const std::vector<MethodSpec> methods{
        {"prior", MethodSpec::Kind::prior, ""},
        {"fallback", MethodSpec::Kind::fallback, ""},
        {"refined", MethodSpec::Kind::refine_edges, "ext"},
    };
    const EvalResult r = run_benchmark(dataset, methods, cfg);

    REQUIRE(r.scores.size() == 2);
    CHECK(r.warnings.empty());
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t m = 0; m < 3; ++m) {
            REQUIRE(r.scores[s][m].has_value());
            CHECK(*r.scores[s][m] >= 0);
            CHECK(*r.scores[s][m] <= 1);
        }
    // The synthetic priors sit in the degraded band; refinement recovers.
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(*r.scores[s][0] >= 0.80);
        CHECK(*r.scores[s][0] <= 0.92);
        CHECK(*r.scores[s][2] >= 0.95);
        CHECK(*r.scores[s][2] > *r.scores[s][0]);
    }

    SUBCASE("a missing edge key becomes a warning, not a crash") {
        const std::vector<MethodSpec> broken{
            {"prior", MethodSpec::Kind::prior, ""},
            {"refined", MethodSpec::Kind::refine_edges, "nope"},
        };
        const EvalResult b = run_benchmark(dataset, broken, cfg);
        CHECK(b.warnings.size() == 2);
        CHECK(b.any_skipped());
        for (std::size_t s = 0; s < 2; ++s) {
            CHECK(b.scores[s][0].has_value());
            CHECK_FALSE(b.scores[s][1].has_value());
        }
        CHECK(render_table(b).find("skipped") != std::string::npos);
    }
    SUBCASE("invalid config is rejected up front") {
        RefineConfig bad = cfg;
        bad.fallback_iou = 2.0;
        CHECK_THROWS_AS(run_benchmark(dataset, methods, bad), InvalidArgument);
    }
}

TEST_CASE("difficulty names round-trip") {
    for (const Difficulty d : {Difficulty::easy, Difficulty::medium, Difficulty::hard})
        CHECK(difficulty_from_string(to_string(d)) == d);
    CHECK(difficulty_from_string("Easy") == Difficulty::easy);
    CHECK(difficulty_from_string("HARD") == Difficulty::hard);
    CHECK_THROWS_AS(difficulty_from_string("nightmare"), InvalidArgument);
}
