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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace planeref::kern {

// Data-parallel raster kernels, OpenMP inside. Every output element is a
// pure function of the inputs, so results are identical for any thread
// count. kern::serial holds independently written reference versions; the
// unit tests compare the two and the bench target times them.

int gaussian_radius(double sigma);
/// Normalized 1-D Gaussian taps, length 2 * gaussian_radius(sigma) + 1.
std::vector<float> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge replication.
void gaussian_blur(const float* src, float* dst, int w, int h, double sigma);

/// 3x3 Sobel with edge replication. gx is the x-derivative, gy the
/// y-derivative (y grows downward).
void sobel(const float* src, float* gx, float* gy, int w, int h);

/// Binary dilation with a (2*radius+1)^2 square structuring element.
void dilate_chebyshev(const std::uint8_t* src, std::uint8_t* dst, int w, int h, int radius);

/// Harris response R = det(M) - k * trace(M)^2 with a box window of odd
/// size `window` over the gradient products.
void harris_response(const float* gx, const float* gy, float* response,
                     int w, int h, int window, double k);

/// Standard (rho, theta) Hough accumulator. Theta bins are i*pi/n_theta,
/// rho bins are round(x cos + y sin) + rho_offset; accum has n_theta rows
/// of n_rho cells and is overwritten.
void hough_accumulate(const double* xs, const double* ys, std::size_t n,
                      int n_theta, int rho_offset, int n_rho, std::uint32_t* accum);

namespace serial {

void gaussian_blur(const float* src, float* dst, int w, int h, double sigma);
void sobel(const float* src, float* gx, float* gy, int w, int h);
void dilate_chebyshev(const std::uint8_t* src, std::uint8_t* dst, int w, int h, int radius);
void harris_response(const float* gx, const float* gy, float* response,
                     int w, int h, int window, double k);
void hough_accumulate(const double* xs, const double* ys, std::size_t n,
                      int n_theta, int rho_offset, int n_rho, std::uint32_t* accum);

} // namespace serial

} // namespace planeref::kern
