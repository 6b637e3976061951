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

// Side-by-side timings of the OpenMP kernels and their serial references.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "planeref/common.hpp"
#include "planeref/kernels.hpp"

namespace {

using namespace planeref;

constexpr int kW = 1280;
constexpr int kH = 960;

std::vector<float> noise_image() {
    Rng rng(7);
    std::vector<float> img(static_cast<std::size_t>(kW) * kH);
    for (auto& p : img) p = static_cast<float>(rng.unit() * 255.0);
    return img;
}

std::vector<std::uint8_t> noise_bits() {
    Rng rng(11);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(kW) * kH);
    for (auto& b : bits) b = rng.below(10) == 0 ? 1 : 0;
    return bits;
}

void bm_blur_omp(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> dst(src.size());
    for (auto _ : state) {
        kern::gaussian_blur(src.data(), dst.data(), kW, kH, 1.4);
        benchmark::DoNotOptimize(dst.data());
    }
}
void bm_blur_serial(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> dst(src.size());
    for (auto _ : state) {
        kern::serial::gaussian_blur(src.data(), dst.data(), kW, kH, 1.4);
        benchmark::DoNotOptimize(dst.data());
    }
}

void bm_sobel_omp(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> gx(src.size()), gy(src.size());
    for (auto _ : state) {
        kern::sobel(src.data(), gx.data(), gy.data(), kW, kH);
        benchmark::DoNotOptimize(gx.data());
    }
}
void bm_sobel_serial(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> gx(src.size()), gy(src.size());
    for (auto _ : state) {
        kern::serial::sobel(src.data(), gx.data(), gy.data(), kW, kH);
        benchmark::DoNotOptimize(gx.data());
    }
}

void bm_dilate_omp(benchmark::State& state) {
    const auto src = noise_bits();
    std::vector<std::uint8_t> dst(src.size());
    for (auto _ : state) {
        kern::dilate_chebyshev(src.data(), dst.data(), kW, kH, 5);
        benchmark::DoNotOptimize(dst.data());
    }
}
void bm_dilate_serial(benchmark::State& state) {
    const auto src = noise_bits();
    std::vector<std::uint8_t> dst(src.size());
    for (auto _ : state) {
        kern::serial::dilate_chebyshev(src.data(), dst.data(), kW, kH, 5);
        benchmark::DoNotOptimize(dst.data());
    }
}

void bm_harris_omp(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> gx(src.size()), gy(src.size()), resp(src.size());
    kern::sobel(src.data(), gx.data(), gy.data(), kW, kH);
    for (auto _ : state) {
        kern::harris_response(gx.data(), gy.data(), resp.data(), kW, kH, 5, 0.04);
        benchmark::DoNotOptimize(resp.data());
    }
}
void bm_harris_serial(benchmark::State& state) {
    const auto src = noise_image();
    std::vector<float> gx(src.size()), gy(src.size()), resp(src.size());
    kern::serial::sobel(src.data(), gx.data(), gy.data(), kW, kH);
    for (auto _ : state) {
        kern::serial::harris_response(gx.data(), gy.data(), resp.data(), kW, kH, 5, 0.04);
        benchmark::DoNotOptimize(resp.data());
    }
}

struct HoughInput {
    std::vector<double> xs, ys;
    int n_theta = 180, rho_offset = 1600, n_rho = 3201;
};

HoughInput hough_input() {
    Rng rng(13);
    HoughInput in;
    for (int i = 0; i < 20000; ++i) {
        in.xs.push_back(static_cast<double>(rng.below(kW)));
        in.ys.push_back(static_cast<double>(rng.below(kH)));
    }
    return in;
}

void bm_hough_omp(benchmark::State& state) {
    const auto in = hough_input();
    std::vector<std::uint32_t> accum(static_cast<std::size_t>(in.n_theta) * in.n_rho);
    for (auto _ : state) {
        kern::hough_accumulate(in.xs.data(), in.ys.data(), in.xs.size(), in.n_theta,
                               in.rho_offset, in.n_rho, accum.data());
        benchmark::DoNotOptimize(accum.data());
    }
}
void bm_hough_serial(benchmark::State& state) {
    const auto in = hough_input();
    std::vector<std::uint32_t> accum(static_cast<std::size_t>(in.n_theta) * in.n_rho);
    for (auto _ : state) {
        kern::serial::hough_accumulate(in.xs.data(), in.ys.data(), in.xs.size(), in.n_theta,
                                       in.rho_offset, in.n_rho, accum.data());
        benchmark::DoNotOptimize(accum.data());
    }
}

BENCHMARK(bm_blur_omp);
BENCHMARK(bm_blur_serial);
BENCHMARK(bm_sobel_omp);
BENCHMARK(bm_sobel_serial);
BENCHMARK(bm_dilate_omp);
BENCHMARK(bm_dilate_serial);
BENCHMARK(bm_harris_omp);
BENCHMARK(bm_harris_serial);
BENCHMARK(bm_hough_omp);
BENCHMARK(bm_hough_serial);

} // namespace

BENCHMARK_MAIN();
