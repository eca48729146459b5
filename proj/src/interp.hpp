/*
 * uhfsynth - synthetic training data and evaluation tools for brain MRI
 *
 * Copyright 2026 The uhfsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Separable 1D kernels shared by the field synthesis and resampling code.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "uhfsynth/volume.hpp"

namespace uhfsynth::detail {

/// Four source indices (already clamped) and their weights for one output sample.
struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

/// Uniform cubic B-spline basis at fraction f of the interval [1, 2].
inline std::array<double, 4> bspline_weights(double f) {
  const double f2 = f * f, f3 = f2 * f;
  return {(1 - f) * (1 - f) * (1 - f) / 6.0, (3 * f3 - 6 * f2 + 4) / 6.0, (-3 * f3 + 3 * f2 + 3 * f + 1) / 6.0,
          f3 / 6.0};
}

/// Catmull-Rom (interpolating) cubic weights.
inline std::array<double, 4> catmull_rom_weights(double f) {
  const double f2 = f * f, f3 = f2 * f;
  return {(-f3 + 2 * f2 - f) / 2.0, (3 * f3 - 5 * f2 + 2) / 2.0, (-3 * f3 + 4 * f2 + f) / 2.0, (f3 - f2) / 2.0};
}

inline Taps make_taps(double x, int n, std::array<double, 4> (*kernel)(double)) {
  const double base = std::floor(x);
  const double f = x - base;
  const int b = static_cast<int>(base);
  Taps t;
  t.weight = kernel(f);
  for (int q = 0; q < 4; ++q) t.index[q] = clamp_index(b - 1 + q, n);
  return t;
}

/// Applies per-output taps along one axis of a dense x-fastest grid.
inline std::vector<double> apply_axis(const std::vector<double>& src, const Dims& src_dims, int axis,
                                      const std::vector<Taps>& taps) {
  Dims out_dims = src_dims;
  out_dims[axis] = static_cast<int>(taps.size());
  std::vector<double> out(Volume<double>::voxel_count(out_dims));
  const std::size_t nx = static_cast<std::size_t>(src_dims[0]);
  const std::size_t ny = static_cast<std::size_t>(src_dims[1]);
  const std::size_t onx = static_cast<std::size_t>(out_dims[0]);
  const std::size_t ony = static_cast<std::size_t>(out_dims[1]);
  for (int k = 0; k < out_dims[2]; ++k) {
    for (int j = 0; j < out_dims[1]; ++j) {
      for (int i = 0; i < out_dims[0]; ++i) {
        std::array<int, 3> p{i, j, k};
        const Taps& t = taps[static_cast<std::size_t>(p[axis])];
        double acc = 0;
        for (int q = 0; q < 4; ++q) {
          p[axis] = t.index[q];
          acc += t.weight[q] * src[static_cast<std::size_t>(p[0]) + nx * (static_cast<std::size_t>(p[1]) + ny * p[2])];
        }
        out[static_cast<std::size_t>(i) + onx * (static_cast<std::size_t>(j) + ony * k)] = acc;
      }
    }
  }
  return out;
}

/// Smooth cubic B-spline upsampling of a coarse control grid so that the
/// control lattice spans the full output grid.
inline std::vector<double> bspline_upsample(const std::vector<double>& control, const Dims& control_dims,
                                            const Dims& out_dims) {
  std::vector<double> cur = control;
  Dims cur_dims = control_dims;
  for (int axis = 0; axis < 3; ++axis) {
    const int n = out_dims[axis];
    const int kc = control_dims[axis];
    std::vector<Taps> taps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double x = n == 1 ? 0.5 * (kc - 1) : static_cast<double>(i) * (kc - 1) / (n - 1);
      taps[static_cast<std::size_t>(i)] = make_taps(x, kc, bspline_weights);
    }
    cur = apply_axis(cur, cur_dims, axis, taps);
    cur_dims[axis] = n;
  }
  return cur;
}

}  // namespace uhfsynth::detail
