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

#include "uhfsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uhfsynth/random.hpp"

namespace uhfsynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared Euclidean distance transform along one line (Felzenszwalb &
// Huttenlocher), with sample spacing `w`. Infinite inputs are not sources.
void edt_line(std::vector<double>& f, double w, std::vector<int>& v, std::vector<double>& z, std::vector<double>& out) {
  const int n = static_cast<int>(f.size());
  const double w2 = w * w;
  auto intersect = [&](int q, int p) {
    return ((f[q] + w2 * q * q) - (f[p] + w2 * p * p)) / (2.0 * w2 * (q - p));
  };
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
  } else {
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z[j + 1] < q) ++j;
      const double d = w * (q - v[j]);
      out[q] = d * d + f[v[j]];
    }
  }
  f.swap(out);
}

struct Box {
  std::array<int, 3> lo{}, hi{};  // inclusive
  Dims dims() const { return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1}; }
};

// Squared distance (mm^2) from every voxel of `box` to the nearest source.
std::vector<double> squared_edt(const std::vector<std::array<int, 3>>& sources, const Box& box, const Vec3& spacing) {
  const Dims d = box.dims();
  const std::size_t nx = static_cast<std::size_t>(d[0]), ny = static_cast<std::size_t>(d[1]);
  std::vector<double> grid(nx * ny * static_cast<std::size_t>(d[2]), kInf);
  for (const auto& s : sources)
    grid[(s[0] - box.lo[0]) + nx * ((s[1] - box.lo[1]) + ny * static_cast<std::size_t>(s[2] - box.lo[2]))] = 0.0;

  const int longest = std::max({d[0], d[1], d[2]});
  std::vector<double> f, out;
  std::vector<int> v(static_cast<std::size_t>(longest));
  std::vector<double> z(static_cast<std::size_t>(longest) + 1);
  for (int axis = 0; axis < 3; ++axis) {
    const int n = d[axis];
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? nx : nx * ny;
    const int o1 = axis == 0 ? 1 : 0;
    const int o2 = axis == 2 ? 1 : 2;
    f.resize(static_cast<std::size_t>(n));
    out.resize(static_cast<std::size_t>(n));
    for (int b = 0; b < d[o2]; ++b) {
      for (int a = 0; a < d[o1]; ++a) {
        std::array<std::size_t, 3> start{0, 0, 0};
        start[o1] = static_cast<std::size_t>(a);
        start[o2] = static_cast<std::size_t>(b);
        const std::size_t base = start[0] + nx * (start[1] + ny * start[2]);
        for (int q = 0; q < n; ++q) f[q] = grid[base + q * stride];
        edt_line(f, spacing[axis], v, z, out);
        for (int q = 0; q < n; ++q) grid[base + q * stride] = f[q];
      }
    }
  }
  return grid;
}

std::vector<std::array<int, 3>> surface_voxels(const MaskVolume& m) {
  std::vector<std::array<int, 3>> out;
  static constexpr std::array<std::array<int, 3>, 6> kFace{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  for (int k = 0; k < m.dims[2]; ++k) {
    for (int j = 0; j < m.dims[1]; ++j) {
      for (int i = 0; i < m.dims[0]; ++i) {
        if (!m.at(i, j, k)) continue;
        const bool boundary = std::any_of(kFace.begin(), kFace.end(), [&](const auto& o) {
          const int a = i + o[0], b = j + o[1], c = k + o[2];
          return !m.contains(a, b, c) || !m.at(a, b, c);
        });
        if (boundary) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted[lo] + f * (sorted[hi] - sorted[lo]);
}

}  // namespace

MaskVolume label_mask(const LabelVolume& labels, std::uint16_t label) {
  MaskVolume m(labels.dims, labels.affine);
  for (std::size_t i = 0; i < labels.size(); ++i) m.data[i] = labels.data[i] == label ? 1 : 0;
  return m;
}

double dice(std::span<const std::uint8_t> g, std::span<const std::uint8_t> p) {
  if (g.size() != p.size()) throw DataError("dice needs masks on a common grid");
  std::size_t ng = 0, np = 0, both = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool a = g[i] != 0, b = p[i] != 0;
    ng += a;
    np += b;
    both += a && b;
  }
  if (ng + np == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(ng + np);
}

double dice(const LabelVolume& gt, const LabelVolume& pred, std::uint16_t label) {
  if (gt.dims != pred.dims) throw DataError("dice needs label maps on a common grid");
  std::size_t ng = 0, np = 0, both = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool a = gt.data[i] == label, b = pred.data[i] == label;
    ng += a;
    np += b;
    both += a && b;
  }
  if (ng + np == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(ng + np);
}

std::vector<Vec3> extract_surface(const MaskVolume& segment, const Vec3& spacing) {
  std::vector<Vec3> pts;
  for (const auto& v : surface_voxels(segment))
    pts.push_back({v[0] * spacing[0], v[1] * spacing[1], v[2] * spacing[2]});
  return pts;
}

double average_surface_distance(const MaskVolume& g, const MaskVolume& p, const Vec3& spacing) {
  if (g.dims != p.dims) throw DataError("surface distance needs masks on a common grid");
  const auto sg = surface_voxels(g);
  const auto sp = surface_voxels(p);
  if (sg.empty() || sp.empty()) return std::numeric_limits<double>::quiet_NaN();

  // Every source and query lies in the joint bounding box, so the transform
  // can be restricted to it.
  Box box{{g.dims[0], g.dims[1], g.dims[2]}, {-1, -1, -1}};
  for (const auto* set : {&sg, &sp})
    for (const auto& v : *set)
      for (int a = 0; a < 3; ++a) {
        box.lo[a] = std::min(box.lo[a], v[a]);
        box.hi[a] = std::max(box.hi[a], v[a]);
      }
  const Dims bd = box.dims();
  auto at = [&](const std::vector<double>& grid, const std::array<int, 3>& v) {
    return grid[(v[0] - box.lo[0]) +
                static_cast<std::size_t>(bd[0]) * ((v[1] - box.lo[1]) + static_cast<std::size_t>(bd[1]) * (v[2] - box.lo[2]))];
  };

  double total = 0;
  const auto to_p = squared_edt(sp, box, spacing);
  for (const auto& v : sg) total += std::sqrt(at(to_p, v));
  const auto to_g = squared_edt(sg, box, spacing);
  for (const auto& v : sp) total += std::sqrt(at(to_g, v));
  return total / static_cast<double>(sg.size() + sp.size());
}

std::vector<std::uint16_t> default_eval_labels() {
  std::vector<std::uint16_t> labels;
  for (std::uint16_t l = 1; l <= 34; ++l) labels.push_back(l);
  return labels;
}

std::vector<MetricRecord> evaluate(const LabelVolume& gt, const LabelVolume& pred,
                                   const std::vector<std::uint16_t>& labels) {
  require_same_geometry(gt, pred, "ground truth and prediction");
  const Vec3 spacing = gt.spacing();
  std::vector<MetricRecord> records;
  records.reserve(labels.size());
  for (auto label : labels) {
    const MaskVolume g = label_mask(gt, label);
    const MaskVolume p = label_mask(pred, label);
    const bool has_g = std::find(g.data.begin(), g.data.end(), 1) != g.data.end();
    const bool has_p = std::find(p.data.begin(), p.data.end(), 1) != p.data.end();
    MetricRecord r;
    r.label = label;
    if (!has_g && !has_p) {
      r.dsc = 1.0;
      r.asd = 0.0;
      r.absent_in_both = true;
    } else if (!has_g || !has_p) {
      r.dsc = 0.0;
      r.asd = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.dsc = dice(g.data, p.data);
      r.asd = average_surface_distance(g, p, spacing);
    }
    records.push_back(r);
  }
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty list");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

AggregateSummary aggregate(const std::vector<double>& values, std::uint64_t seed, int resamples) {
  std::vector<double> finite;
  std::copy_if(values.begin(), values.end(), std::back_inserter(finite), [](double v) { return std::isfinite(v); });
  if (finite.empty()) throw DataError("no finite values to aggregate");
  if (resamples < 1) throw ConfigError("bootstrap needs at least one resample");

  AggregateSummary s;
  s.n = finite.size();
  s.median = median(finite);

  const RandomStream rng(seed, hash_tag("bootstrap-median"));
  const std::uint64_t n = finite.size();
  std::vector<double> medians(static_cast<std::size_t>(resamples));
  std::vector<double> draw(finite.size());
  std::uint64_t position = 0;
  int word = 4;
  Philox4x32::Counter block{};
  for (auto& m : medians) {
    for (auto& d : draw) {
      if (word == 4) {
        block = rng.block_at(position++);
        word = 0;
      }
      // Multiply-shift index; the bias is below n / 2^32.
      d = finite[(std::uint64_t{block[word++]} * n) >> 32];
    }
    m = median(draw);
  }
  std::sort(medians.begin(), medians.end());
  // The percentile interval can miss the point estimate on tiny samples; widen
  // it so that ci_low <= median <= ci_high always holds.
  s.ci_low = std::min(percentile(medians, 0.025), s.median);
  s.ci_high = std::max(percentile(medians, 0.975), s.median);
  return s;
}

}  // namespace uhfsynth
