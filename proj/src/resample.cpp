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

#include "uhfsynth/resample.hpp"

#include <algorithm>
#include <cmath>

#include "interp.hpp"

namespace uhfsynth {

namespace {

// Corner indices and weights of the trilinear stencil for one output voxel.
struct Trilinear {
  std::array<std::size_t, 8> index;
  std::array<double, 8> weight;
};

struct AxisStencil {
  int lo, hi;
  double f;
};

AxisStencil axis_stencil(double x, int n) {
  const double base = std::floor(x);
  const int b = static_cast<int>(base);
  return {detail::clamp_index(b, n), detail::clamp_index(b + 1, n), x - base};
}

template <typename Fn>
void for_each_trilinear(const LabelVolume& labels, const ResampleGrid& grid, Fn&& fn) {
  std::array<std::vector<AxisStencil>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    axes[a].resize(static_cast<std::size_t>(grid.dims[a]));
    for (int j = 0; j < grid.dims[a]; ++j) axes[a][j] = axis_stencil(grid.offset[a] + j * grid.step[a], labels.dims[a]);
  }
  Trilinear t;
  for (int k = 0; k < grid.dims[2]; ++k) {
    const AxisStencil& sz = axes[2][k];
    for (int j = 0; j < grid.dims[1]; ++j) {
      const AxisStencil& sy = axes[1][j];
      for (int i = 0; i < grid.dims[0]; ++i) {
        const AxisStencil& sx = axes[0][i];
        int c = 0;
        for (int dz = 0; dz < 2; ++dz) {
          const double wz = dz ? sz.f : 1 - sz.f;
          const int kz = dz ? sz.hi : sz.lo;
          for (int dy = 0; dy < 2; ++dy) {
            const double wy = dy ? sy.f : 1 - sy.f;
            const int jy = dy ? sy.hi : sy.lo;
            for (int dx = 0; dx < 2; ++dx, ++c) {
              const double wx = dx ? sx.f : 1 - sx.f;
              t.index[c] = labels.index(dx ? sx.hi : sx.lo, jy, kz);
              t.weight[c] = wx * wy * wz;
            }
          }
        }
        fn(static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.dims[0]) *
                                               (static_cast<std::size_t>(j) + static_cast<std::size_t>(grid.dims[1]) * k),
           t);
      }
    }
  }
}

}  // namespace

ResampleGrid resample_grid(const Dims& dims, const Affine& affine, const ResampleSpec& spec) {
  const Vec3 src = affine.spacing();
  ResampleGrid grid;
  Vec3 origin_index{};
  for (int a = 0; a < 3; ++a) {
    if (!(spec.target_spacing[a] > 0)) throw ConfigError("target spacing must be positive");
    double ratio = spec.target_spacing[a] / src[a];
    // Header spacings are float32; treat near-equal spacing as identical.
    if (std::abs(ratio - 1.0) < 1e-6) ratio = 1.0;
    const long n = std::lround(dims[a] / ratio);
    if (n < 1) throw DataError("resampling would produce an empty grid");
    grid.dims[a] = static_cast<int>(n);
    grid.step[a] = ratio;
    grid.offset[a] = 0.5 * ratio - 0.5;
    origin_index[a] = grid.offset[a];
    for (int r = 0; r < 3; ++r) grid.affine.m[r][a] = affine.m[r][a] * ratio;
  }
  const Vec3 origin = affine.apply(origin_index);
  for (int r = 0; r < 3; ++r) grid.affine.m[r][3] = origin[r];
  grid.affine.m[3] = {0, 0, 0, 1};
  return grid;
}

ScalarVolume resample_image(const ScalarVolume& img, const ResampleSpec& spec) {
  validate(img);
  const ResampleGrid grid = resample_grid(img.dims, img.affine, spec);
  std::vector<double> cur(img.data.begin(), img.data.end());
  Dims cur_dims = img.dims;
  for (int a = 0; a < 3; ++a) {
    std::vector<detail::Taps> taps(static_cast<std::size_t>(grid.dims[a]));
    for (int j = 0; j < grid.dims[a]; ++j)
      taps[j] = detail::make_taps(grid.offset[a] + j * grid.step[a], img.dims[a], detail::catmull_rom_weights);
    cur = detail::apply_axis(cur, cur_dims, a, taps);
    cur_dims[a] = grid.dims[a];
  }
  ScalarVolume out(grid.dims, grid.affine);
  std::transform(cur.begin(), cur.end(), out.data.begin(), [](double v) { return static_cast<float>(v); });
  return out;
}

LabelVolume resample_labelmap(const LabelVolume& labels, const ResampleSpec& spec) {
  validate(labels);
  const ResampleGrid grid = resample_grid(labels.dims, labels.affine, spec);
  LabelVolume out(grid.dims, grid.affine);
  for_each_trilinear(labels, grid, [&](std::size_t out_idx, const Trilinear& t) {
    std::array<std::uint16_t, 8> seen{};
    std::array<double, 8> total{};
    int n = 0;
    for (int c = 0; c < 8; ++c) {
      const auto l = labels.data[t.index[c]];
      int s = 0;
      while (s < n && seen[s] != l) ++s;
      if (s == n) {
        seen[n] = l;
        total[n] = 0;
        ++n;
      }
      total[s] += t.weight[c];
    }
    int best = 0;
    for (int s = 1; s < n; ++s)
      if (total[s] > total[best] || (total[s] == total[best] && seen[s] < seen[best])) best = s;
    out.data[out_idx] = seen[best];
  });
  return out;
}

std::map<std::uint16_t, Volume<double>> onehot_interpolate(const LabelVolume& labels, const ResampleSpec& spec) {
  validate(labels);
  const ResampleGrid grid = resample_grid(labels.dims, labels.affine, spec);
  std::map<std::uint16_t, Volume<double>> channels;
  for (auto l : label_domain(labels)) channels.emplace(l, Volume<double>(grid.dims, grid.affine, 0.0));
  for (auto& [label, channel] : channels) {
    const std::uint16_t l = label;
    auto& data = channel.data;
    for_each_trilinear(labels, grid, [&](std::size_t out_idx, const Trilinear& t) {
      double acc = 0;
      for (int c = 0; c < 8; ++c)
        if (labels.data[t.index[c]] == l) acc += t.weight[c];
      data[out_idx] = acc;
    });
  }
  return channels;
}

}  // namespace uhfsynth
