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

#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracles.hpp"
#include "planeref/common.hpp"
#include "planeref/geom.hpp"
#include "planeref/kernels.hpp"

using namespace planeref;

namespace {

std::vector<float> random_image(Rng& rng, int w, int h, bool integer_valued) {
    std::vector<float> img(static_cast<std::size_t>(w) * h);
    for (auto& v : img)
        v = integer_valued ? static_cast<float>(rng.below(256))
                           : static_cast<float>(255.0 * rng.unit());
    return img;
}

std::vector<std::uint8_t> random_bits(Rng& rng, int w, int h, double density) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
    for (auto& b : bits) b = rng.unit() < density ? 1 : 0;
    return bits;
}

// Runs fn once per configured thread count and checks all results agree
// bit for bit with the first.
template <typename Fn>
void check_thread_invariant(Fn fn) {
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto base = fn();
    omp_set_num_threads(8);
    const auto wide = fn();
    omp_set_num_threads(saved);
    CHECK(base == wide);
#else
    const auto base = fn();
    CHECK(base == fn());
#endif
}

} // namespace

TEST_CASE("gaussian taps are normalized and symmetric") {
    for (const double sigma : {0.8, 1.4, 2.5}) {
        const auto k = kern::gaussian_kernel(sigma);
        const int r = kern::gaussian_radius(sigma);
        REQUIRE(static_cast<int>(k.size()) == 2 * r + 1);
        double sum = 0;
        for (int i = 0; i <= r; ++i) {
            CHECK(k[r - i] == k[r + i]);
            sum += i == 0 ? k[r] : 2.0 * k[r + i];
        }
        CHECK(sum == doctest::Approx(1).epsilon(1e-6));
        for (int i = 1; i <= r; ++i) CHECK(k[r + i] < k[r + i - 1]);
    }
}

TEST_CASE("gaussian blur matches the direct 2-D reference") {
    Rng rng(100);
    const int w = 37, h = 23;
    for (const double sigma : {0.9, 1.4, 2.2}) {
        const auto src = random_image(rng, w, h, false);
        std::vector<float> fast(src.size()), ref(src.size());
        kern::gaussian_blur(src.data(), fast.data(), w, h, sigma);
        kern::serial::gaussian_blur(src.data(), ref.data(), w, h, sigma);
        // Separable float passes against a direct double-precision
        // convolution: only rounding separates them.
        for (std::size_t i = 0; i < src.size(); ++i)
            CHECK(std::abs(fast[i] - ref[i]) < 0.01);
    }

    const auto flat = std::vector<float>(static_cast<std::size_t>(w) * h, 150.0f);
    std::vector<float> out(flat.size());
    kern::gaussian_blur(flat.data(), out.data(), w, h, 1.4);
    for (const float v : out) CHECK(v == doctest::Approx(150).epsilon(1e-5));

    const auto fixed = random_image(rng, w, h, false);
    check_thread_invariant([&] {
        std::vector<float> dst(fixed.size());
        kern::gaussian_blur(fixed.data(), dst.data(), w, h, 1.4);
        return dst;
    });
}

TEST_CASE("sobel matches the reference exactly on integer images") {
    Rng rng(101);
    const int w = 31, h = 19;
    // All intermediates are small integers, exact in float, so the two
    // implementations must agree bit for bit.
    const auto src = random_image(rng, w, h, true);
    std::vector<float> gx(src.size()), gy(src.size()), rx(src.size()), ry(src.size());
    kern::sobel(src.data(), gx.data(), gy.data(), w, h);
    kern::serial::sobel(src.data(), rx.data(), ry.data(), w, h);
    CHECK(gx == rx);
    CHECK(gy == ry);

    // Linear ramp: constant interior gradient of 8x the slope, zero gy.
    std::vector<float> ramp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) ramp[static_cast<std::size_t>(y) * w + x] = 10.0f * x;
    kern::sobel(ramp.data(), gx.data(), gy.data(), w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 1; x < w - 1; ++x) {
            CHECK(gx[static_cast<std::size_t>(y) * w + x] == 80.0f);
            CHECK(gy[static_cast<std::size_t>(y) * w + x] == 0.0f);
        }

    check_thread_invariant([&] {
        std::vector<float> ox(src.size()), oy(src.size());
        kern::sobel(src.data(), ox.data(), oy.data(), w, h);
        ox.insert(ox.end(), oy.begin(), oy.end());
        return ox;
    });
}

TEST_CASE("chebyshev dilation matches the reference") {
    Rng rng(102);
    const int w = 29, h = 17;
    for (const int radius : {0, 1, 3, 6}) {
        const auto src = random_bits(rng, w, h, 0.08);
        std::vector<std::uint8_t> fast(src.size()), ref(src.size());
        kern::dilate_chebyshev(src.data(), fast.data(), w, h, radius);
        kern::serial::dilate_chebyshev(src.data(), ref.data(), w, h, radius);
        CHECK(fast == ref);
    }
    const auto fixed = random_bits(rng, w, h, 0.1);
    check_thread_invariant([&] {
        std::vector<std::uint8_t> dst(fixed.size());
        kern::dilate_chebyshev(fixed.data(), dst.data(), w, h, 2);
        return dst;
    });
}

TEST_CASE("harris response matches the reference exactly") {
    Rng rng(103);
    const int w = 25, h = 21;
    const auto gx = random_image(rng, w, h, false);
    const auto gy = random_image(rng, w, h, false);
    std::vector<float> fast(gx.size()), ref(gx.size());
    kern::harris_response(gx.data(), gy.data(), fast.data(), w, h, 5, 0.04);
    kern::serial::harris_response(gx.data(), gy.data(), ref.data(), w, h, 5, 0.04);
    CHECK(fast == ref);

    check_thread_invariant([&] {
        std::vector<float> r(gx.size());
        kern::harris_response(gx.data(), gy.data(), r.data(), w, h, 5, 0.04);
        return r;
    });
}

TEST_CASE("hough accumulation matches the reference and the brute force") {
    Rng rng(104);
    const int n_theta = 180, rho_offset = 120, n_rho = 241;
    for (int c = 0; c < 20; ++c) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> xs(n), ys(n);
        std::vector<Point> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = 100.0 * rng.unit();
            ys[i] = 80.0 * rng.unit();
            pts[i] = {xs[i], ys[i]};
        }
        std::vector<std::uint32_t> fast(static_cast<std::size_t>(n_theta) * n_rho);
        std::vector<std::uint32_t> ref(fast.size());
        kern::hough_accumulate(xs.data(), ys.data(), n, n_theta, rho_offset, n_rho, fast.data());
        kern::serial::hough_accumulate(xs.data(), ys.data(), n, n_theta, rho_offset, n_rho,
                                       ref.data());
        CHECK(fast == ref);
        CHECK(fast == oracle::hough_votes(pts, n_theta, rho_offset, n_rho));
    }

    check_thread_invariant([&] {
        const std::vector<double> xs{3, 40, 77}, ys{5, 41, 60};
        std::vector<std::uint32_t> accum(static_cast<std::size_t>(n_theta) * n_rho);
        kern::hough_accumulate(xs.data(), ys.data(), 3, n_theta, rho_offset, n_rho, accum.data());
        return accum;
    });
}
