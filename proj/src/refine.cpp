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

#include "planeref/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace planeref {

namespace {

bool lex_less(const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Support-weighted circular mean of the members' normal forms, anchored at
// the strongest member so the theta wrap does not split the average.
NormalLine average_line(std::span<const SegmentCandidate> members,
                        std::span<const NormalLine> forms) {
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < members.size(); ++i)
        if (members[i].support > members[anchor].support) anchor = i;

    double sum_r = 0, sum_t = 0, sum_w = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        double rho = forms[i].rho, theta = forms[i].theta;
        if (std::abs(theta - forms[anchor].theta) > std::numbers::pi / 2) {
            rho = -rho;
            theta += theta < forms[anchor].theta ? std::numbers::pi : -std::numbers::pi;
        }
        const double w = std::max(1, members[i].support);
        sum_r += w * rho;
        sum_t += w * theta;
        sum_w += w;
    }
    double rho = sum_r / sum_w;
    double theta = sum_t / sum_w;
    while (theta < 0) {
        theta += std::numbers::pi;
        rho = -rho;
    }
    while (theta >= std::numbers::pi) {
        theta -= std::numbers::pi;
        rho = -rho;
    }
    return NormalLine{rho, theta};
}

// Distance between two lines in (rho, theta * scale) space; theta wraps with
// a rho flip, so take the closer of the two representations.
double normal_distance(const NormalLine& a, const NormalLine& b, double scale) {
    const double direct = std::hypot(a.rho - b.rho, (a.theta - b.theta) * scale);
    const double wrapped = std::hypot(
        a.rho + b.rho, (std::numbers::pi - std::abs(a.theta - b.theta)) * scale);
    return std::min(direct, wrapped);
}

// Draws up to `want` distinct extract pixels within `radius` of `center`.
void sample_near(std::vector<Point>& side, const Point& center, double radius,
                 int want, std::span<const Point> pixels, Rng& rng) {
    std::vector<std::size_t> eligible;
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double dx = pixels[i].x - center.x, dy = pixels[i].y - center.y;
        if (dx * dx + dy * dy <= r2) eligible.push_back(i);
    }
    const std::size_t take = std::min<std::size_t>(want, eligible.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
        side.push_back(pixels[eligible[i]]);
    }
}

} // namespace

std::vector<EdgeHypothesis> cluster_edges(std::span<const SegmentCandidate> candidates,
                                          const ContourExtract& extract,
                                          const RefineConfig& cfg, std::uint64_t seed) {
    std::vector<const SegmentCandidate*> cands;
    std::vector<NormalLine> forms;
    for (const auto& c : candidates) {
        if (c.segment.length() < 1e-9) continue;
        cands.push_back(&c);
        forms.push_back(segment_to_normal(c.segment));
    }

    std::vector<EdgeHypothesis> out;
    if (cands.empty()) return out;

    const double scale = std::hypot(extract.width, extract.height) / std::numbers::pi;
    auto dist = [&](std::size_t i, std::size_t j) {
        return normal_distance(forms[i], forms[j], scale);
    };
    const ClusterLabeling labeling = dbscan_custom(cands.size(), dist, cfg.edge_cluster_eps, 1);

    for (int h = 0; h < labeling.k; ++h) {
        EdgeHypothesis hyp;
        std::vector<NormalLine> member_forms;
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (labeling.labels[i] == h) {
                hyp.members.push_back(*cands[i]);
                member_forms.push_back(forms[i]);
            }
        hyp.line = average_line(hyp.members, member_forms);

        std::vector<Point> endpoints;
        for (const auto& m : hyp.members) {
            endpoints.push_back(m.segment.a);
            endpoints.push_back(m.segment.b);
        }
        const KMeansResult split =
            kmeans(endpoints, 2, mix_seed(seed, 301 + static_cast<std::uint64_t>(h)));

        // Side A sits at the lower parameter along the line direction.
        const Point d = hyp.line.direction();
        int ia = 0, ib = 1;
        const double t0 = split.centroids[0].x * d.x + split.centroids[0].y * d.y;
        const double t1 = split.centroids[1].x * d.x + split.centroids[1].y * d.y;
        if (t1 < t0) std::swap(ia, ib);
        for (std::size_t i = 0; i < endpoints.size(); ++i)
            (split.labeling.labels[i] == ia ? hyp.A : hyp.B).push_back(endpoints[i]);
        hyp.centroid_a = split.centroids[ia];
        hyp.centroid_b = split.centroids[ib];

        Rng rng(mix_seed(seed, 401 + static_cast<std::uint64_t>(h)));
        sample_near(hyp.A, hyp.centroid_a, cfg.candidate_sample_radius, cfg.candidate_samples,
                    extract.pixels, rng);
        sample_near(hyp.B, hyp.centroid_b, cfg.candidate_sample_radius, cfg.candidate_samples,
                    extract.pixels, rng);
        out.push_back(std::move(hyp));
    }
    return out;
}

double edge_cost(const Point& pa, const Point& pb, const EdgeMap& m_e,
                 std::span<const Point> A, std::span<const Point> B) {
    const double len = distance(pa, pb);
    if (len < 1e-9) return 0;

    double max_len = 0;
    for (const auto& k : A)
        for (const auto& l : B) max_len = std::max(max_len, distance(k, l));
    if (max_len <= 0) return 0;

    const auto px = line_pixels(pa, pb);
    std::size_t on = 0;
    for (const auto& [x, y] : px)
        if (m_e.in_bounds(x, y) && m_e.get(x, y)) ++on;
    const double overlap = static_cast<double>(on) / static_cast<double>(px.size());

    return 0.5 * overlap + 0.5 * len / max_len;
}

EdgeChoice select_endpoints(const EdgeHypothesis& h, const EdgeMap& m_e) {
    if (h.A.empty() || h.B.empty())
        throw DegenerateInput("select_endpoints: empty candidate side");

    EdgeChoice best{h.A.front(), h.B.front(),
                    edge_cost(h.A.front(), h.B.front(), m_e, h.A, h.B)};
    double best_len = distance(best.a, best.b);
    for (const auto& pa : h.A)
        for (const auto& pb : h.B) {
            const double c = edge_cost(pa, pb, m_e, h.A, h.B);
            if (c < best.cost) continue;
            if (c > best.cost) {
                best = {pa, pb, c};
                best_len = distance(pa, pb);
                continue;
            }
            const double len = distance(pa, pb);
            const bool longer = len > best_len;
            const bool same_len = len == best_len;
            const bool lex = lex_less(pa, best.a) ||
                             (pa.x == best.a.x && pa.y == best.a.y && lex_less(pb, best.b));
            if (longer || (same_len && lex)) {
                best = {pa, pb, c};
                best_len = len;
            }
        }
    return best;
}

Polygon assemble_mask(std::span<const SelectedEdge> edges, const RasterMask& prior,
                      double vicinity_radius) {
    if (edges.size() < 3) throw InsufficientEdges("assemble_mask: need at least 3 edges");

    const Point c = mask_centroid(prior);
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto angle_of = [&](std::size_t i) {
        const Point m = LineSegment{edges[i].a, edges[i].b}.midpoint();
        return std::atan2(m.y - c.y, m.x - c.x);
    };
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double ai = angle_of(i), aj = angle_of(j);
        return ai < aj || (ai == aj && i < j);
    });

    std::vector<Point> verts;
    const std::size_t n = order.size();
    for (std::size_t k = 0; k < n; ++k) {
        const SelectedEdge& cur = edges[order[k]];
        const SelectedEdge& nxt = edges[order[(k + 1) % n]];

        // Facing endpoints: the closest pair across the two segments.
        Point p = cur.a, q = nxt.a;
        double best = std::numeric_limits<double>::max();
        for (const Point& pc : {cur.a, cur.b})
            for (const Point& qc : {nxt.a, nxt.b}) {
                const double d = distance(pc, qc);
                if (d < best) {
                    best = d;
                    p = pc;
                    q = qc;
                }
            }

        const auto x = intersect(cur.line, nxt.line);
        if (x && distance(*x, p) <= vicinity_radius && distance(*x, q) <= vicinity_radius) {
            verts.push_back(*x);
        } else {
            verts.push_back(p);
            verts.push_back(q);
        }
    }

    // Collapse duplicates from intersections landing on endpoints.
    std::vector<Point> dedup;
    for (const auto& v : verts) {
        if (!dedup.empty() && distance(dedup.back(), v) < 1e-9) continue;
        dedup.push_back(v);
    }
    while (dedup.size() > 1 && distance(dedup.front(), dedup.back()) < 1e-9) dedup.pop_back();

    if (dedup.size() < 3) throw InsufficientEdges("assemble_mask: degenerate outline");
    Polygon poly{std::move(dedup)};
    if (!polygon_is_simple(poly)) throw InsufficientEdges("assemble_mask: self-intersecting outline");
    return poly;
}

Polygon fallback_mask(const RasterMask& prior, int max_points) {
    const EdgeMap contour = mask_contour(prior);
    std::vector<Point> pts;
    for (int y = 0; y < contour.height; ++y)
        for (int x = 0; x < contour.width; ++x)
            if (contour.get(x, y))
                pts.push_back(Point{static_cast<double>(x), static_cast<double>(y)});
    return simplify(convex_hull(pts), static_cast<std::size_t>(max_points));
}

bool should_fallback(const std::optional<Polygon>& assembled, double refined_prior_iou,
                     const RefineConfig& cfg) {
    return !assembled.has_value() || refined_prior_iou < cfg.fallback_iou;
}

RefineReport finalize_report(int mask_id, const std::optional<Polygon>& assembled,
                             std::vector<EdgeChoice> choices, const RasterMask& prior,
                             const RefineConfig& cfg) {
    RefineReport report;
    report.mask_id = mask_id;
    report.edges = std::move(choices);

    if (assembled) {
        report.refined_mask = rasterize(*assembled, prior.width, prior.height);
        report.prior_iou = mask_iou(report.refined_mask, prior);
    }
    if (should_fallback(assembled, report.prior_iou, cfg)) {
        report.used_fallback = true;
        report.refined = fallback_mask(prior, cfg.max_fallback_points);
        report.refined_mask = rasterize(report.refined, prior.width, prior.height);
    } else {
        report.refined = *assembled;
    }
    return report;
}

RefineReport refine_mask(const RasterMask& prior, const EdgeMap& edges,
                         const RefineConfig& cfg, int mask_id) {
    cfg.validate();
    const std::uint64_t seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(mask_id));

    const ContourExtract extract = extract_contour(edges, prior, cfg.widen_radius, mask_id);
    std::optional<Polygon> assembled;
    std::vector<EdgeChoice> choices;

    if (!extract.pixels.empty()) {
        const CornerSet corners = harris_corners(extract.as_edge_map(), cfg.corner_k,
                                                 cfg.corner_window, cfg.corner_rel_threshold);
        std::vector<SegmentCandidate> cands =
            segments_by_clustering(extract, corners, cfg, seed);
        for (std::size_t i = 0; i < cands.size(); ++i)
            cands[i] = extend_segment(cands[i], edges, cfg,
                                      mix_seed(seed, 201 + static_cast<std::uint64_t>(i)));
        const std::vector<SegmentCandidate> hough = segments_by_hough(extract, cfg);
        cands.insert(cands.end(), hough.begin(), hough.end());

        const std::vector<EdgeHypothesis> hyps = cluster_edges(cands, extract, cfg, seed);

        EdgeMap cost_mask;
        if (cfg.cost_mask_source == CostMaskSource::extract) {
            cost_mask = extract.as_edge_map();
        } else {
            cost_mask = EdgeMap(prior.width, prior.height);
            cost_mask.bits = prior.bits;
        }

        std::vector<SelectedEdge> selected;
        std::vector<double> costs;
        std::vector<int> supports;
        int max_support = 0;
        for (const auto& hyp : hyps) {
            const EdgeChoice choice = select_endpoints(hyp, cost_mask);
            choices.push_back(choice);
            if (distance(choice.a, choice.b) < 1e-9) continue;
            selected.push_back({choice.a, choice.b, line_through(choice.a, choice.b)});
            costs.push_back(choice.cost);
            int sup = 0;
            for (const auto& m : hyp.members) sup = std::max(sup, m.support);
            supports.push_back(sup);
            max_support = std::max(max_support, sup);
        }

        auto discard = [&](auto keep) {
            std::vector<SelectedEdge> e;
            std::vector<double> c;
            std::vector<int> s;
            for (std::size_t i = 0; i < selected.size(); ++i)
                if (keep(i)) {
                    e.push_back(selected[i]);
                    c.push_back(costs[i]);
                    s.push_back(supports[i]);
                }
            selected.swap(e);
            costs.swap(c);
            supports.swap(s);
        };

        // Weakly supported hypotheses are usually accumulator artifacts of
        // the stronger ones; prune them when enough edges remain.
        if (cfg.support_prune > 0) {
            std::size_t strong = 0;
            for (int s : supports)
                if (s >= cfg.support_prune * max_support) ++strong;
            if (strong >= 3)
                discard([&](std::size_t i) {
                    return supports[i] >= cfg.support_prune * max_support;
                });
        }

        // Distinct hypotheses can still settle on the same physical edge, a
        // Hough peak and its staircase harmonics in particular. Collapse
        // selections where one segment lies along the other, keeping the
        // best cost, so assembly sees each edge once.
        if (!selected.empty()) {
            auto dist = [&](std::size_t i, std::size_t j) {
                const SelectedEdge& si = selected[i];
                const SelectedEdge& sj = selected[j];
                const double dij = std::max(point_segment_distance(si.a, sj.a, sj.b),
                                            point_segment_distance(si.b, sj.a, sj.b));
                const double dji = std::max(point_segment_distance(sj.a, si.a, si.b),
                                            point_segment_distance(sj.b, si.a, si.b));
                return std::min(dij, dji);
            };
            const ClusterLabeling groups =
                dbscan_custom(selected.size(), dist, cfg.edge_cluster_eps, 1);
            std::vector<std::size_t> winners;
            for (int g = 0; g < groups.k; ++g) {
                std::size_t best = selected.size();
                for (std::size_t i = 0; i < selected.size(); ++i) {
                    if (groups.labels[i] != g) continue;
                    if (best == selected.size() || costs[i] > costs[best] ||
                        (costs[i] == costs[best] &&
                         distance(selected[i].a, selected[i].b) >
                             distance(selected[best].a, selected[best].b)))
                        best = i;
                }
                winners.push_back(best);
            }
            discard([&](std::size_t i) {
                return std::find(winners.begin(), winners.end(), i) != winners.end();
            });
        }

        // If the outline self-intersects, retry without the weakest edge.
        while (selected.size() >= 3) {
            try {
                assembled = assemble_mask(selected, prior, cfg.assembly_radius);
                break;
            } catch (const InsufficientEdges&) {
                const std::size_t worst =
                    std::min_element(costs.begin(), costs.end()) - costs.begin();
                selected.erase(selected.begin() + worst);
                costs.erase(costs.begin() + worst);
                supports.erase(supports.begin() + worst);
            }
        }
    }

    return finalize_report(mask_id, assembled, std::move(choices), prior, cfg);
}

std::string report_to_json(const RefineReport& report) {
    nlohmann::json j;
    j["mask_id"] = report.mask_id;
    j["used_fallback"] = report.used_fallback;
    j["prior_iou"] = report.prior_iou;
    j["width"] = report.refined_mask.width;
    j["height"] = report.refined_mask.height;

    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : report.refined.vertices) verts.push_back({v.x, v.y});
    j["polygon"] = {{"vertices", verts}};

    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : report.edges)
        edges.push_back({{"a", {e.a.x, e.a.y}}, {"b", {e.b.x, e.b.y}}, {"cost", e.cost}});
    j["edges"] = edges;
    return j.dump(2);
}

} // namespace planeref
