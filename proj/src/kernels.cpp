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

#include "planeref/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace planeref::kern {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

} // namespace

int gaussian_radius(double sigma) {
    return std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
}

std::vector<float> gaussian_kernel(double sigma) {
    const int r = gaussian_radius(sigma);
    std::vector<float> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + r] = static_cast<float>(v);
        sum += v;
    }
    for (auto& v : k) v = static_cast<float>(v / sum);
    return k;
}

void gaussian_blur(const float* src, float* dst, int w, int h, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int r = gaussian_radius(sigma);
    std::vector<float> tmp(static_cast<std::size_t>(w) * h);

    // Horizontal pass
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const float* row = src + static_cast<std::size_t>(y) * w;
        float* out = tmp.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * row[clampi(x + i, 0, w - 1)];
            out[x] = acc;
        }
    }
    // Vertical pass
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        float* out = dst + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0;
            for (int i = -r; i <= r; ++i)
                acc += k[i + r] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            out[x] = acc;
        }
    }
}

void sobel(const float* src, float* gx, float* gy, int w, int h) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const int ym = clampi(y - 1, 0, h - 1), yp = clampi(y + 1, 0, h - 1);
        const float* rm = src + static_cast<std::size_t>(ym) * w;
        const float* r0 = src + static_cast<std::size_t>(y) * w;
        const float* rp = src + static_cast<std::size_t>(yp) * w;
        for (int x = 0; x < w; ++x) {
            const int xm = clampi(x - 1, 0, w - 1), xp = clampi(x + 1, 0, w - 1);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = (rm[xp] + 2.0f * r0[xp] + rp[xp]) - (rm[xm] + 2.0f * r0[xm] + rp[xm]);
            gy[i] = (rp[xm] + 2.0f * rp[x] + rp[xp]) - (rm[xm] + 2.0f * rm[x] + rm[xp]);
        }
    }
}

void dilate_chebyshev(const std::uint8_t* src, std::uint8_t* dst, int w, int h, int radius) {
    if (radius == 0) {
        std::memcpy(dst, src, static_cast<std::size_t>(w) * h);
        return;
    }
    // Square structuring element separates into a horizontal and a vertical
    // running-max pass.
    std::vector<std::uint8_t> tmp(static_cast<std::size_t>(w) * h, 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = src + static_cast<std::size_t>(y) * w;
        std::uint8_t* out = tmp.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const int lo = std::max(0, x - radius), hi = std::min(w - 1, x + radius);
            std::uint8_t v = 0;
            for (int i = lo; i <= hi && !v; ++i) v = row[i];
            out[x] = v;
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        std::uint8_t* out = dst + static_cast<std::size_t>(y) * w;
        const int lo = std::max(0, y - radius), hi = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 0;
            for (int i = lo; i <= hi && !v; ++i)
                v = tmp[static_cast<std::size_t>(i) * w + x];
            out[x] = v;
        }
    }
}

void harris_response(const float* gx, const float* gy, float* response,
                     int w, int h, int window, double k) {
    const int r = window / 2;
    const float kf = static_cast<float>(k);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float sxx = 0, sxy = 0, syy = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = clampi(y + dy, 0, h - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = clampi(x + dx, 0, w - 1);
                    const std::size_t i = static_cast<std::size_t>(yy) * w + xx;
                    sxx += gx[i] * gx[i];
                    sxy += gx[i] * gy[i];
                    syy += gy[i] * gy[i];
                }
            }
            const float det = sxx * syy - sxy * sxy;
            const float tr = sxx + syy;
            response[static_cast<std::size_t>(y) * w + x] = det - kf * tr * tr;
        }
    }
}

void hough_accumulate(const double* xs, const double* ys, std::size_t n,
                      int n_theta, int rho_offset, int n_rho, std::uint32_t* accum) {
    std::memset(accum, 0, sizeof(std::uint32_t) * static_cast<std::size_t>(n_theta) * n_rho);
    const double step = std::numbers::pi / n_theta;
    // Each thread owns whole theta rows, so the integer votes land without
    // races and the result never depends on the schedule.
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_theta; ++t) {
        const double c = std::cos(t * step), s = std::sin(t * step);
        std::uint32_t* row = accum + static_cast<std::size_t>(t) * n_rho;
        for (std::size_t i = 0; i < n; ++i) {
            const int rbin = static_cast<int>(std::llround(xs[i] * c + ys[i] * s)) + rho_offset;
            if (rbin >= 0 && rbin < n_rho) ++row[rbin];
        }
    }
}

namespace serial {

void gaussian_blur(const float* src, float* dst, int w, int h, double sigma) {
    // Direct 2-D convolution in double precision; the outer product of the
    // normalized 1-D taps equals the separable result up to rounding.
    const auto k = gaussian_kernel(sigma);
    const int r = gaussian_radius(sigma);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = clampi(y + dy, 0, h - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = clampi(x + dx, 0, w - 1);
                    acc += static_cast<double>(k[dy + r]) * k[dx + r] *
                           src[static_cast<std::size_t>(yy) * w + xx];
                }
            }
            dst[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
        }
    }
}

void sobel(const float* src, float* gx, float* gy, int w, int h) {
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float ax = 0, ay = 0;
            for (int dy = 0; dy < 3; ++dy) {
                const int yy = clampi(y + dy - 1, 0, h - 1);
                for (int dx = 0; dx < 3; ++dx) {
                    const int xx = clampi(x + dx - 1, 0, w - 1);
                    const float v = src[static_cast<std::size_t>(yy) * w + xx];
                    ax += kx[dy][dx] * v;
                    ay += ky[dy][dx] * v;
                }
            }
            gx[static_cast<std::size_t>(y) * w + x] = ax;
            gy[static_cast<std::size_t>(y) * w + x] = ay;
        }
    }
}

void dilate_chebyshev(const std::uint8_t* src, std::uint8_t* dst, int w, int h, int radius) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = 0;
            for (int dy = -radius; dy <= radius && !v; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                for (int dx = -radius; dx <= radius && !v; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= w) continue;
                    v = src[static_cast<std::size_t>(yy) * w + xx];
                }
            }
            dst[static_cast<std::size_t>(y) * w + x] = v ? 1 : 0;
        }
    }
}

void harris_response(const float* gx, const float* gy, float* response,
                     int w, int h, int window, double k) {
    const int r = window / 2;
    const float kf = static_cast<float>(k);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float sxx = 0, sxy = 0, syy = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = clampi(y + dy, 0, h - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = clampi(x + dx, 0, w - 1);
                    const std::size_t i = static_cast<std::size_t>(yy) * w + xx;
                    sxx += gx[i] * gx[i];
                    sxy += gx[i] * gy[i];
                    syy += gy[i] * gy[i];
                }
            }
            const float det = sxx * syy - sxy * sxy;
            const float tr = sxx + syy;
            response[static_cast<std::size_t>(y) * w + x] = det - kf * tr * tr;
        }
    }
}

void hough_accumulate(const double* xs, const double* ys, std::size_t n,
                      int n_theta, int rho_offset, int n_rho, std::uint32_t* accum) {
    std::memset(accum, 0, sizeof(std::uint32_t) * static_cast<std::size_t>(n_theta) * n_rho);
    const double step = std::numbers::pi / n_theta;
    // Point-major loop order, unlike the parallel version.
    for (std::size_t i = 0; i < n; ++i) {
        for (int t = 0; t < n_theta; ++t) {
            const double rho = xs[i] * std::cos(t * step) + ys[i] * std::sin(t * step);
            const int rbin = static_cast<int>(std::llround(rho)) + rho_offset;
            if (rbin >= 0 && rbin < n_rho)
                ++accum[static_cast<std::size_t>(t) * n_rho + rbin];
        }
    }
}

} // namespace serial

} // namespace planeref::kern
