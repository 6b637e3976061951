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

#include "planeref/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "planeref/common.hpp"

namespace planeref {

namespace {

constexpr int kUnassigned = -2;

// Shared core/expand logic once a neighbor query is fixed.
ClusterLabeling dbscan_impl(std::size_t n,
                            const std::function<std::vector<std::size_t>(std::size_t)>& neighbors,
                            int min_pts) {
    ClusterLabeling out;
    out.labels.assign(n, kUnassigned);

    std::vector<char> core(n, 0);
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        adj[i] = neighbors(i); // includes i itself
        core[i] = adj[i].size() >= static_cast<std::size_t>(min_pts);
    }

    int next = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || out.labels[seed] != kUnassigned) continue;
        const int id = next++;
        out.labels[seed] = id;
        std::deque<std::size_t> queue{seed};
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            for (const std::size_t q : adj[p]) {
                if (out.labels[q] != kUnassigned) continue;
                out.labels[q] = id;
                if (core[q]) queue.push_back(q);
            }
        }
    }
    for (auto& l : out.labels)
        if (l == kUnassigned) l = ClusterLabeling::kNoise;
    out.k = next;
    return out;
}

} // namespace

ClusterLabeling dbscan(std::span<const Point> points, double eps, int min_pts) {
    if (eps <= 0) throw InvalidArgument("dbscan: eps must be positive");
    if (min_pts < 1) throw InvalidArgument("dbscan: min_pts must be >= 1");
    const std::size_t n = points.size();

    // Uniform grid with eps-sized cells; neighbors live in the 3x3 block.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    auto cell_of = [&](const Point& p) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / eps));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / eps));
        return std::pair<std::int64_t, std::int64_t>{cx, cy};
    };
    auto key_of = [](std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto [cx, cy] = cell_of(points[i]);
        grid[key_of(cx, cy)].push_back(i);
    }

    const double eps2 = eps * eps;
    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        const auto [cx, cy] = cell_of(points[i]);
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                const auto it = grid.find(key_of(cx + dx, cy + dy));
                if (it == grid.end()) continue;
                for (const std::size_t j : it->second) {
                    const double ddx = points[i].x - points[j].x;
                    const double ddy = points[i].y - points[j].y;
                    if (ddx * ddx + ddy * ddy <= eps2) out.push_back(j);
                }
            }
        std::sort(out.begin(), out.end());
        return out;
    };
    return dbscan_impl(n, neighbors, min_pts);
}

ClusterLabeling dbscan_custom(std::size_t n,
                              const std::function<double(std::size_t, std::size_t)>& dist,
                              double eps, int min_pts) {
    if (eps <= 0) throw InvalidArgument("dbscan_custom: eps must be positive");
    if (min_pts < 1) throw InvalidArgument("dbscan_custom: min_pts must be >= 1");
    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (i == j || dist(i, j) <= eps) out.push_back(j);
        return out;
    };
    return dbscan_impl(n, neighbors, min_pts);
}

namespace {

double sq_dist(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace

KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed) {
    const std::size_t n = points.size();
    if (k < 1) throw InvalidArgument("kmeans: k must be >= 1");
    if (n < static_cast<std::size_t>(k)) throw InvalidArgument("kmeans: fewer points than clusters");

    Rng rng(seed);
    KMeansResult res;
    auto& centroids = res.centroids;

    // k-means++ seeding.
    centroids.push_back(points[rng.below(n)]);
    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0) {
            centroids.push_back(points[rng.below(n)]);
            continue;
        }
        double target = rng.unit() * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target <= 0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<int> assign(n, -1);
    auto reassign = [&]() {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = sq_dist(points[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], centroids[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        return changed;
    };
    auto objective = [&]() {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += sq_dist(points[i], centroids[assign[i]]);
        return s;
    };

    reassign();
    res.objective_history.push_back(objective());

    for (int iter = 0; iter < 100; ++iter) {
        std::vector<Point> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign[i]].x += points[i].x;
            sums[assign[i]].y += points[i].y;
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            centroids[c] = {sums[c].x / counts[c], sums[c].y / counts[c]};
        }
        // An emptied cluster grabs the point farthest from its own centroid.
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            double worst = -1;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] < 2) continue;
                const double d = sq_dist(points[i], centroids[assign[i]]);
                if (d > worst) {
                    worst = d;
                    pick = i;
                }
            }
            --counts[assign[pick]];
            assign[pick] = c;
            counts[c] = 1;
            centroids[c] = points[pick];
        }

        const bool changed = reassign();
        res.objective_history.push_back(objective());
        if (!changed) break;
    }

    res.labeling.labels = std::move(assign);
    res.labeling.k = k;
    return res;
}

FittedLine fit_line_tls(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 2) throw DegenerateInput("fit_line_tls: need at least 2 points");

    double mx = 0, my = 0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : points) {
        const double dx = p.x - mx, dy = p.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx + syy < 1e-12) throw DegenerateInput("fit_line_tls: points are coincident");

    // Principal axis of the scatter matrix.
    const double tr = sxx + syy;
    const double det = sxx * syy - sxy * sxy;
    const double lambda = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4 * det)));
    Point dir;
    if (std::abs(sxy) > 1e-12)
        dir = {sxy, lambda - sxx};
    else
        dir = sxx >= syy ? Point{1, 0} : Point{0, 1};

    FittedLine fit;
    fit.model = line_through(Point{mx, my}, Point{mx + dir.x, my + dir.y});
    fit.inliers.resize(n);
    for (std::size_t i = 0; i < n; ++i) fit.inliers[i] = i;
    return fit;
}

FittedLine ransac_line(std::span<const Point> points, double inlier_tol,
                       int iterations, std::uint64_t seed) {
    const std::size_t n = points.size();
    if (inlier_tol <= 0) throw InvalidArgument("ransac_line: inlier_tol must be positive");
    if (iterations < 1) throw InvalidArgument("ransac_line: iterations must be >= 1");

    bool distinct = false;
    for (std::size_t i = 1; i < n && !distinct; ++i)
        distinct = sq_dist(points[0], points[i]) > 1e-24;
    if (n < 2 || !distinct) throw DegenerateInput("ransac_line: need two distinct points");

    auto collect = [&](const NormalLine& model) {
        std::vector<std::size_t> in;
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = model.distance(points[i]);
            if (d <= inlier_tol) {
                in.push_back(i);
                total += d;
            }
        }
        return std::pair{std::move(in), total};
    };

    Rng rng(seed);
    std::vector<std::size_t> best_in;
    double best_total = 0;
    bool have_best = false;
    for (int it = 0; it < iterations; ++it) {
        const std::size_t i = rng.below(n);
        const std::size_t j = rng.below(n);
        if (i == j || sq_dist(points[i], points[j]) < 1e-24) continue;
        const NormalLine model = line_through(points[i], points[j]);
        auto [in, total] = collect(model);
        if (!have_best || in.size() > best_in.size() ||
            (in.size() == best_in.size() && total < best_total)) {
            best_in = std::move(in);
            best_total = total;
            have_best = true;
        }
    }
    if (!have_best) {
        // Pathological draw sequence; fall back to the first distinct pair.
        for (std::size_t j = 1; j < n && !have_best; ++j)
            if (sq_dist(points[0], points[j]) > 1e-24) {
                auto [in, total] = collect(line_through(points[0], points[j]));
                best_in = std::move(in);
                have_best = true;
            }
    }

    std::vector<Point> support;
    support.reserve(best_in.size());
    for (const std::size_t i : best_in) support.push_back(points[i]);
    const FittedLine refit = fit_line_tls(support);

    FittedLine out;
    out.model = refit.model;
    out.inliers = collect(out.model).first;
    out.residual_threshold = inlier_tol;
    return out;
}

} // namespace planeref
