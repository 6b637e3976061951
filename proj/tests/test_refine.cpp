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
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "planeref/refine.hpp"
#include "synthscene.hpp"

using namespace planeref;

namespace {

ContourExtract extract_from_chain(int w, int h, const std::vector<Point>& pts) {
    ContourExtract ex;
    ex.width = w;
    ex.height = h;
    ex.pixels = pts;
    return ex;
}

std::vector<Point> chain(const Point& a, const Point& b) {
    std::vector<Point> out;
    for (const auto& [x, y] : line_pixels(a, b))
        out.push_back({static_cast<double>(x), static_cast<double>(y)});
    return out;
}

EdgeMap map_of(int w, int h, const std::vector<Point>& pts) {
    EdgeMap m(w, h);
    for (const auto& p : pts)
        if (m.in_bounds(static_cast<int>(p.x), static_cast<int>(p.y)))
            m.set(static_cast<int>(p.x), static_cast<int>(p.y), true);
    return m;
}

SegmentCandidate cand(const Point& a, const Point& b, int support) {
    return {{a, b}, SegmentCandidate::Source::clustering, support};
}

const std::vector<Point> kRhombus{{170, 240}, {320, 140}, {470, 240}, {320, 340}};

} // namespace

TEST_CASE("cluster_edges groups same-edge candidates and splits their ends") {
    RefineConfig cfg;
    std::vector<Point> px = chain({40, 100}, {260, 100});
    const ContourExtract ex = extract_from_chain(640, 480, px);

    SUBCASE("near-identical segments form one hypothesis with sampled sides") {
        const std::vector<SegmentCandidate> cands{cand({50, 100}, {150, 100}, 100),
                                                  cand({52, 101}, {149, 99}, 90)};
        const auto hyps = cluster_edges(cands, ex, cfg, 1);
        REQUIRE(hyps.size() == 1);
        CHECK(hyps[0].members.size() == 2);
        CHECK(hyps[0].A.size() == 12); // 2 member endpoints + 10 samples
        CHECK(hyps[0].B.size() == 12);
        CHECK(std::abs(distance(hyps[0].centroid_a, hyps[0].centroid_b) - 98.5) < 5.0);
        // The averaged line runs through the members.
        CHECK(hyps[0].line.distance({50, 100}) < 2.0);
        CHECK(hyps[0].line.distance({150, 100}) < 2.0);
        // Sampled side points come from the extract near the centroids.
        for (const auto& side : {hyps[0].A, hyps[0].B})
            for (const auto& p : side) {
                const bool member = std::any_of(px.begin(), px.end(), [&](const Point& q) {
                    return q.x == p.x && q.y == p.y;
                });
                const bool endpoint = distance(p, {50, 100}) < 3 || distance(p, {52, 101}) < 3 ||
                                      distance(p, {150, 100}) < 3 || distance(p, {149, 99}) < 3;
                CHECK((member || endpoint));
            }
    }
    SUBCASE("perpendicular segments stay apart") {
        const std::vector<SegmentCandidate> cands{cand({50, 100}, {150, 100}, 100),
                                                  cand({100, 50}, {100, 150}, 100)};
        CHECK(cluster_edges(cands, ex, cfg, 1).size() == 2);
    }
    SUBCASE("empty input gives nothing") {
        CHECK(cluster_edges({}, ex, cfg, 1).empty());
    }
    SUBCASE("deterministic for a fixed seed") {
        const std::vector<SegmentCandidate> cands{cand({50, 100}, {150, 100}, 100)};
        const auto a = cluster_edges(cands, ex, cfg, 7);
        const auto b = cluster_edges(cands, ex, cfg, 7);
        REQUIRE(a.size() == b.size());
        REQUIRE(a[0].A.size() == b[0].A.size());
        for (std::size_t i = 0; i < a[0].A.size(); ++i) {
            CHECK(a[0].A[i].x == b[0].A[i].x);
            CHECK(a[0].A[i].y == b[0].A[i].y);
        }
    }
}

TEST_CASE("edge_cost follows the half-overlap half-length formula") {
    const auto px = chain({10, 10}, {40, 10});
    const EdgeMap full = map_of(64, 64, px);
    const std::vector<Point> A{{10, 10}};
    const std::vector<Point> B{{40, 10}};

    SUBCASE("full overlap at maximal length scores 1") {
        CHECK(edge_cost({10, 10}, {40, 10}, full, A, B) == doctest::Approx(1));
    }
    SUBCASE("partial overlap scores the exact fraction") {
        EdgeMap half(64, 64);
        for (int x = 10; x <= 25; ++x) half.set(x, 10, true);
        const double expected = 0.5 * (16.0 / 31.0) + 0.5;
        CHECK(edge_cost({10, 10}, {40, 10}, half, A, B) == doctest::Approx(expected));
    }
    SUBCASE("coincident endpoints are worthless") {
        CHECK(edge_cost({10, 10}, {10, 10}, full, A, B) == 0);
    }
    SUBCASE("shorter pairs pay the length penalty") {
        const std::vector<Point> B2{{40, 10}, {20, 10}};
        const double short_cost = edge_cost({10, 10}, {20, 10}, full, A, B2);
        const double long_cost = edge_cost({10, 10}, {40, 10}, full, A, B2);
        CHECK(short_cost == doctest::Approx(0.5 + 0.5 * (10.0 / 30.0)));
        CHECK(long_cost > short_cost);
    }
    SUBCASE("cost stays within [0, 1] on random pairs") {
        Rng rng(12);
        for (int i = 0; i < 100; ++i) {
            const Point a{static_cast<double>(rng.below(64)), static_cast<double>(rng.below(64))};
            const Point b{static_cast<double>(rng.below(64)), static_cast<double>(rng.below(64))};
            const double c = edge_cost(a, b, full, std::vector<Point>{a}, std::vector<Point>{b});
            CHECK(c >= 0);
            CHECK(c <= 1);
        }
    }
}

TEST_CASE("select_endpoints equals the exhaustive oracle on 200 random cases") {
    Rng rng(2025);
    for (int c = 0; c < 200; ++c) {
        EdgeMap map(40, 40);
        for (int y = 0; y < 40; ++y)
            for (int x = 0; x < 40; ++x)
                if (rng.unit() < 0.3) map.set(x, y, true);

        EdgeHypothesis h;
        const int na = 2 + static_cast<int>(rng.below(5));
        const int nb = 2 + static_cast<int>(rng.below(5));
        // Half-integer coordinates exercise the rounding path too.
        for (int i = 0; i < na; ++i)
            h.A.push_back({rng.below(79) / 2.0, rng.below(79) / 2.0});
        for (int i = 0; i < nb; ++i)
            h.B.push_back({rng.below(79) / 2.0, rng.below(79) / 2.0});

        const EdgeChoice got = select_endpoints(h, map);
        const oracle::BestPair want = oracle::best_endpoint_pair(h.A, h.B, map);
        CHECK(got.cost == want.cost);
        CHECK(got.a.x == want.a.x);
        CHECK(got.a.y == want.a.y);
        CHECK(got.b.x == want.b.x);
        CHECK(got.b.y == want.b.y);
    }
}

TEST_CASE("select_endpoints is order-free and rejects empty sides") {
    EdgeMap map(32, 32);
    for (int x = 4; x <= 28; ++x) map.set(x, 16, true);
    EdgeHypothesis h;
    h.A = {{4, 16}, {6, 20}, {5, 12}};
    h.B = {{28, 16}, {26, 10}, {27, 22}};
    const EdgeChoice base = select_endpoints(h, map);
    EdgeHypothesis shuffled;
    shuffled.A = {h.A[2], h.A[0], h.A[1]};
    shuffled.B = {h.B[1], h.B[2], h.B[0]};
    const EdgeChoice same = select_endpoints(shuffled, map);
    CHECK(base.a.x == same.a.x);
    CHECK(base.b.x == same.b.x);
    CHECK(base.cost == same.cost);

    EdgeHypothesis empty;
    empty.A = {{1, 1}};
    CHECK_THROWS_AS(select_endpoints(empty, map), DegenerateInput);
}

TEST_CASE("assemble_mask walks edges angularly around the prior") {
    const Polygon rhombus{kRhombus};
    const RasterMask prior = rasterize(rhombus, 640, 480);

    SUBCASE("four perfect edges meet at the corners") {
        std::vector<SelectedEdge> edges;
        for (std::size_t i = 0; i < 4; ++i) {
            const Point a = kRhombus[i];
            const Point b = kRhombus[(i + 1) % 4];
            edges.push_back({a, b, line_through(a, b)});
        }
        const Polygon out = assemble_mask(edges, prior, 40.0);
        REQUIRE(out.vertices.size() == 4);
        CHECK(polygon_is_simple(out));
        for (const auto& v : out.vertices) {
            double best = 1e30;
            for (const auto& c : kRhombus) best = std::min(best, distance(v, c));
            CHECK(best <= 1.5);
        }
        // Edge order must not matter.
        std::vector<SelectedEdge> shuffled{edges[2], edges[0], edges[3], edges[1]};
        const Polygon again = assemble_mask(shuffled, prior, 40.0);
        CHECK(mask_iou(rasterize(again, 640, 480), rasterize(out, 640, 480)) ==
              doctest::Approx(1));
    }
    SUBCASE("a short third edge bridges into a five-gon") {
        const Point a{100, 100}, b{400, 100}, c{250, 350};
        RasterMask tri_prior = rasterize(Polygon{{a, b, c}}, 512, 512);
        auto shrink = [](const Point& from, const Point& to, double by) {
            const double len = distance(from, to);
            return Point{from.x + (to.x - from.x) * by / len,
                         from.y + (to.y - from.y) * by / len};
        };
        const std::vector<SelectedEdge> edges{
            {a, b, line_through(a, b)},
            {b, c, line_through(b, c)},
            {shrink(c, a, 60.0), shrink(a, c, 60.0), line_through(c, a)},
        };
        const Polygon out = assemble_mask(edges, tri_prior, 40.0);
        CHECK(out.vertices.size() == 5);
        CHECK(polygon_is_simple(out));
    }
    SUBCASE("fewer than three edges cannot close a region") {
        const std::vector<SelectedEdge> two{
            {{170, 240}, {320, 140}, line_through({170, 240}, {320, 140})},
            {{320, 140}, {470, 240}, line_through({320, 140}, {470, 240})},
        };
        CHECK_THROWS_AS(assemble_mask(two, prior, 40.0), InsufficientEdges);
    }
}

TEST_CASE("fallback_mask hulls and simplifies the prior") {
    SUBCASE("rectangular prior keeps its four corners") {
        RasterMask prior(640, 480);
        for (int y = 100; y < 400; ++y)
            for (int x = 150; x < 350; ++x) prior.set(x, y, true);
        const Polygon hull = fallback_mask(prior, 20);
        CHECK(hull.vertices.size() == 4);
        CHECK(mask_iou(rasterize(hull, 640, 480), prior) >= 0.99);
    }
    SUBCASE("the hull fills concave bites") {
        RasterMask prior(200, 200);
        for (int y = 40; y < 160; ++y)
            for (int x = 40; x < 160; ++x)
                if (x - 100 < 0 || y - 100 < 0 || (x - 100) + (y - 100) > 40)
                    prior.set(x, y, true);
        const Polygon hull = fallback_mask(prior, 20);
        const RasterMask filled = rasterize(hull, 200, 200);
        std::size_t missing = 0;
        for (int y = 0; y < 200; ++y)
            for (int x = 0; x < 200; ++x)
                if (prior.get(x, y) && !filled.get(x, y)) ++missing;
        CHECK(missing <= 400); // hull covers the prior up to boundary raster slack
        CHECK(filled.count() > prior.count());
    }
    SUBCASE("round blobs respect the vertex budget") {
        RasterMask prior(200, 200);
        for (int y = 0; y < 200; ++y)
            for (int x = 0; x < 200; ++x)
                if (std::hypot(x - 100, y - 100) <= 70) prior.set(x, y, true);
        const Polygon hull = fallback_mask(prior, 20);
        CHECK(hull.vertices.size() <= 20);
        CHECK(mask_iou(rasterize(hull, 200, 200), prior) >= 0.95);
    }
}

TEST_CASE("the consistency gate is strict at the threshold") {
    RefineConfig cfg;
    const Polygon poly{{{0, 0}, {1, 0}, {1, 1}}};
    CHECK_FALSE(should_fallback(poly, 0.75, cfg));
    CHECK(should_fallback(poly, 0.7499, cfg));
    CHECK(should_fallback(std::nullopt, 1.0, cfg));

    SUBCASE("a refined mask at exactly 0.75 IoU survives finalize_report") {
        RasterMask prior(64, 64);
        for (int y = 10; y <= 39; ++y)
            for (int x = 10; x <= 49; ++x) prior.set(x, y, true);
        const Polygon square{{{10, 10}, {40, 10}, {40, 40}, {10, 40}}};
        // rasterize(square) covers [10,39]^2 = 900 px inside the 1200 px
        // prior: IoU is exactly 0.75.
        const RefineReport report = finalize_report(3, square, {}, prior, cfg);
        CHECK(report.mask_id == 3);
        CHECK(report.prior_iou == doctest::Approx(0.75));
        CHECK_FALSE(report.used_fallback);
        CHECK(report.refined_mask.count() == 900);
    }
    SUBCASE("just below the threshold falls back") {
        RasterMask prior(64, 64);
        for (int y = 10; y <= 39; ++y)
            for (int x = 10; x <= 49; ++x) prior.set(x, y, true);
        const Polygon small{{{10, 10}, {39, 10}, {39, 40}, {10, 40}}};
        const RefineReport report = finalize_report(0, small, {}, prior, cfg);
        CHECK(report.used_fallback);
        CHECK(report.refined.vertices.size() <= static_cast<std::size_t>(cfg.max_fallback_points));
    }
}

TEST_CASE("refine_mask recovers an eroded prior from clean edges") {
    const synth::Scene sc = synth::make_scene(11, 20000.0, 0.0);
    const RasterMask prior = erode_mask(sc.gt, 4);
    RefineConfig cfg;
    cfg.widen_radius = 8;

    const RefineReport report = refine_mask(prior, sc.edges, cfg, 0);
    CHECK_FALSE(report.used_fallback);
    CHECK(mask_iou(report.refined_mask, sc.gt) >= 0.97);
    CHECK(report.prior_iou >= cfg.fallback_iou);
    CHECK(!report.edges.empty());
    for (const auto& e : report.edges) {
        CHECK(e.cost >= 0);
        CHECK(e.cost <= 1);
    }
}

TEST_CASE("refine_mask falls back when the edge map is blank") {
    for (const std::uint64_t seed : {21, 22, 23}) {
        const synth::Scene sc = synth::make_scene(seed);
        const EdgeMap blank(synth::kWidth, synth::kHeight);
        const RefineReport report = refine_mask(sc.prior, blank, RefineConfig{}, 0);
        CHECK(report.used_fallback);
        CHECK(report.refined.vertices.size() <= 20);
        CHECK(mask_iou(report.refined_mask, sc.prior) >= 0.95);
    }
}

TEST_CASE("refine_mask is deterministic and validates its inputs") {
    const synth::Scene sc = synth::make_scene(31);
    RefineConfig cfg;
    cfg.widen_radius = 12;
    cfg.support_prune = 0.6;
    cfg.assembly_radius = 100.0;

    const RefineReport a = refine_mask(sc.prior, sc.edges, cfg, 5);
    const RefineReport b = refine_mask(sc.prior, sc.edges, cfg, 5);
    CHECK(a.refined_mask.bits == b.refined_mask.bits);
    CHECK(a.prior_iou == b.prior_iou);
    CHECK(report_to_json(a) == report_to_json(b));

    CHECK_THROWS_AS(refine_mask(RasterMask(64, 64), EdgeMap(64, 64), RefineConfig{}, 0),
                    EmptyMask);
    RasterMask small(32, 32);
    small.set(5, 5, true);
    CHECK_THROWS_AS(refine_mask(small, EdgeMap(64, 64), RefineConfig{}, 0), DimensionMismatch);
}

TEST_CASE("report JSON carries the contract fields") {
    const synth::Scene sc = synth::make_scene(41);
    RefineConfig cfg;
    cfg.widen_radius = 12;
    cfg.support_prune = 0.6;
    cfg.assembly_radius = 100.0;
    const RefineReport report = refine_mask(sc.prior, sc.edges, cfg, 9);

    const nlohmann::json j = nlohmann::json::parse(report_to_json(report));
    CHECK(j.at("mask_id").get<int>() == 9);
    CHECK(j.at("used_fallback").is_boolean());
    CHECK(j.at("prior_iou").is_number());
    CHECK(j.at("polygon").at("vertices").size() >= 3);
    for (const auto& e : j.at("edges")) {
        CHECK(e.contains("cost"));
        CHECK(e.at("a").size() == 2);
        CHECK(e.at("b").size() == 2);
    }
}

TEST_CASE("config validation rejects out-of-range knobs") {
    RefineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    RefineConfig bad = cfg;
    bad.fallback_iou = 1.5;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.widen_radius = -1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.support_prune = 1.2;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.assembly_radius = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.corner_window = 4;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
