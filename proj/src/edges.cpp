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

#include "planeref/edges.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <numbers>

#include "planeref/common.hpp"
#include "planeref/kernels.hpp"

namespace planeref {

namespace {

std::vector<float> to_float(const GrayImage& img) {
    std::vector<float> out(img.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.data[i];
    return out;
}

GradientField gradients_of(const std::vector<float>& src, int w, int h) {
    GradientField f;
    f.width = w;
    f.height = h;
    f.gx.resize(src.size());
    f.gy.resize(src.size());
    kern::sobel(src.data(), f.gx.data(), f.gy.data(), w, h);
    f.magnitude.resize(src.size());
    f.direction.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        f.magnitude[i] = std::hypot(f.gx[i], f.gy[i]);
        f.direction[i] = std::atan2(f.gy[i], f.gx[i]);
    }
    return f;
}

} // namespace

GradientField sobel(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw InvalidArgument("sobel: image must be at least 3x3");
    return gradients_of(to_float(img), img.width, img.height);
}

int otsu_threshold(std::span<const std::uint64_t> histogram) {
    if (histogram.size() != 256) throw InvalidArgument("otsu_threshold: need 256 bins");

    std::uint64_t total = 0;
    int occupied = 0;
    double sum_all = 0;
    for (int i = 0; i < 256; ++i) {
        total += histogram[i];
        if (histogram[i] > 0) ++occupied;
        sum_all += static_cast<double>(i) * static_cast<double>(histogram[i]);
    }
    if (occupied < 2) throw DegenerateHistogram("otsu_threshold: single-level histogram");

    double best_var = -1;
    int best_t = 0;
    std::uint64_t w0 = 0;
    double sum0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += histogram[t];
        sum0 += static_cast<double>(t) * static_cast<double>(histogram[t]);
        const std::uint64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = sum0 / static_cast<double>(w0);
        const double mu1 = (sum_all - sum0) / static_cast<double>(w1);
        const double var = static_cast<double>(w0) * static_cast<double>(w1) *
                           (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

EdgeMap adaptive_canny(const GrayImage& img, const CannyParams& params) {
    const int w = img.width, h = img.height;
    if (w < 3 || h < 3) throw InvalidArgument("adaptive_canny: image must be at least 3x3");

    std::vector<float> smooth(img.data.size());
    {
        const auto src = to_float(img);
        kern::gaussian_blur(src.data(), smooth.data(), w, h, params.sigma);
    }
    const GradientField f = gradients_of(smooth, w, h);

    float max_mag = 0;
    for (const float m : f.magnitude) max_mag = std::max(max_mag, m);
    if (max_mag <= 0) return EdgeMap(w, h);

    std::array<std::uint64_t, 256> hist{};
    for (const float m : f.magnitude) {
        const int bin = std::min(255, static_cast<int>(m * 255.0f / max_mag));
        ++hist[bin];
    }

    int t;
    try {
        t = otsu_threshold(hist);
    } catch (const DegenerateHistogram&) {
        return EdgeMap(w, h); // uniform gradient, nothing to separate
    }
    const double high = (t + 1) * static_cast<double>(max_mag) / 255.0;
    const double low = params.low_ratio * high;

    // Non-maximum suppression along the gradient, quantized to 4 directions.
    // Tie handling (> forward, >= backward) keeps exactly one pixel of an
    // equal-magnitude pair, so step edges thin to a single line.
    static constexpr int kOff[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    std::vector<float> thin(f.magnitude.size(), 0.0f);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const float m = f.magnitude[i];
            if (m <= 0) continue;
            const double ang = f.direction[i];
            const int bin = ((static_cast<int>(std::llround(ang / (std::numbers::pi / 4))) % 4) + 4) % 4;
            const int dx = kOff[bin][0], dy = kOff[bin][1];
            auto mag_at = [&](int xx, int yy) -> float {
                if (xx < 0 || xx >= w || yy < 0 || yy >= h) return 0.0f;
                return f.magnitude[static_cast<std::size_t>(yy) * w + xx];
            };
            const float n_plus = mag_at(x + dx, y + dy);
            const float n_minus = mag_at(x - dx, y - dy);
            if (m > n_plus && m >= n_minus) thin[i] = m;
        }
    }

    // Hysteresis: flood from strong pixels through weak ones, 8-connected.
    EdgeMap out(w, h);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (thin[i] >= high) {
                out.set(x, y, true);
                queue.emplace_back(x, y);
            }
        }
    while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = cx + dx, ny = cy + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                if (out.get(nx, ny)) continue;
                if (thin[static_cast<std::size_t>(ny) * w + nx] >= low) {
                    out.set(nx, ny, true);
                    queue.emplace_back(nx, ny);
                }
            }
    }
    return out;
}

EdgeMap ingest_edge_map(const std::string& path, int threshold,
                        std::optional<std::pair<int, int>> resize_to) {
    if (threshold < 0 || threshold > 255)
        throw InvalidArgument("ingest_edge_map: threshold outside [0, 255]");
    GrayImage strength = load_gray(path);
    if (resize_to && (resize_to->first != strength.width || resize_to->second != strength.height))
        strength = resize_bilinear(strength, resize_to->first, resize_to->second);

    EdgeMap out(strength.width, strength.height);
    for (int y = 0; y < strength.height; ++y)
        for (int x = 0; x < strength.width; ++x)
            if (strength.at(x, y) >= threshold) out.set(x, y, true);
    return out;
}

CornerSet harris_corners(const EdgeMap& map, double k, int window, double rel_threshold) {
    CornerSet corners;
    if (map.count() == 0) return corners;
    const int w = map.width, h = map.height;
    if (w < 3 || h < 3) return corners;

    std::vector<float> img(map.bits.size());
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = map.bits[i] ? 1.0f : 0.0f;

    std::vector<float> gx(img.size()), gy(img.size()), resp(img.size());
    kern::sobel(img.data(), gx.data(), gy.data(), w, h);
    kern::harris_response(gx.data(), gy.data(), resp.data(), w, h, window, k);

    float max_r = 0;
    for (const float r : resp) max_r = std::max(max_r, r);
    if (max_r <= 0) return corners;
    const float thr = static_cast<float>(rel_threshold) * max_r;

    // Local maxima; plateaus resolve to their first pixel in scan order.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float r = resp[static_cast<std::size_t>(y) * w + x];
            if (r < thr) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const float rn = resp[static_cast<std::size_t>(ny) * w + nx];
                    const bool before = (dy < 0) || (dy == 0 && dx < 0);
                    if (before ? rn >= r : rn > r) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) {
                corners.points.push_back(Point{static_cast<double>(x), static_cast<double>(y)});
                corners.response.push_back(r);
            }
        }
    return corners;
}

} // namespace planeref
