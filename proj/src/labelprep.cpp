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

#include "uhfsynth/labelprep.hpp"

#include <algorithm>
#include <vector>

#include "uhfsynth/labels.hpp"

namespace uhfsynth {

namespace {

// Max (dilate) or min (erode) over a clipped window of +-radius along one
// axis. The cube element is separable, so three passes give the 3D result.
void box_pass(std::vector<std::uint8_t>& data, const Dims& dims, int axis, int radius, bool take_max) {
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? static_cast<std::size_t>(dims[0])
                                                       : static_cast<std::size_t>(dims[0]) * dims[1];
  const int n = dims[axis];
  const int o1 = axis == 0 ? 1 : 0;
  const int o2 = axis == 2 ? 1 : 2;
  std::vector<std::uint8_t> line(static_cast<std::size_t>(n));
  for (int b = 0; b < dims[o2]; ++b) {
    for (int a = 0; a < dims[o1]; ++a) {
      std::array<int, 3> start{0, 0, 0};
      start[o1] = a;
      start[o2] = b;
      const std::size_t base = static_cast<std::size_t>(start[0]) +
                               static_cast<std::size_t>(dims[0]) * (start[1] + static_cast<std::size_t>(dims[1]) * start[2]);
      for (int i = 0; i < n; ++i) line[i] = data[base + i * stride];
      for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        std::uint8_t v = line[lo];
        for (int t = lo + 1; t <= hi; ++t) v = take_max ? std::max(v, line[t]) : std::min(v, line[t]);
        data[base + i * stride] = v;
      }
    }
  }
}

BrainMask morph(const BrainMask& mask, int radius, bool take_max) {
  if (radius < 0) throw ConfigError("morphology radius must be non-negative");
  BrainMask out = mask;
  if (radius == 0) return out;
  for (int axis = 0; axis < 3; ++axis) box_pass(out.data, out.dims, axis, radius, take_max);
  return out;
}

}  // namespace

BrainMask derive_brain_mask(const LabelVolume& labels) {
  validate(labels);
  BrainMask mask(labels.dims, labels.affine);
  bool any = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mask.data[i] = labels.data[i] != 0 ? 1 : 0;
    any = any || labels.data[i] != 0;
  }
  if (!any) throw DataError("empty segmentation");
  return mask;
}

BrainMask dilate(const BrainMask& mask, int radius) { return morph(mask, radius, true); }

BrainMask erode(const BrainMask& mask, int radius) { return morph(mask, radius, false); }

BrainMask binary_closing(const BrainMask& mask) { return erode(dilate(mask, 1), 1); }

int dilation_radius_for(const Vec3& spacing, std::optional<int> override_radius) {
  for (double s : spacing)
    if (!(s > 0)) throw DataError("spacing must be positive");
  if (override_radius) {
    if (*override_radius < 0) throw ConfigError("dilation radius must be non-negative");
    return *override_radius;
  }
  // Header spacings are stored as float32, so 0.7 may read back as 0.70000005.
  const double coarsest = *std::max_element(spacing.begin(), spacing.end());
  return coarsest <= 0.7 + 1e-5 ? 5 : 4;
}

LabelVolume add_extracerebral_label(const LabelVolume& labels, const BrainMask& new_mask) {
  require_same_geometry(labels, new_mask, "label map and dilated mask");
  LabelVolume out = labels;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.data[i] == 0 && new_mask.data[i] != 0) out.data[i] = kExtraCerebral;
  return out;
}

ScalarVolume apply_mask(const ScalarVolume& image, const BrainMask& mask) {
  require_same_geometry(image, mask, "image and mask");
  ScalarVolume out = image;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask.data[i] == 0) out.data[i] = 0.0f;
  return out;
}

PreparedLabels prepare_labels(const LabelVolume& labels, std::optional<int> override_radius) {
  PreparedLabels out;
  out.radius = dilation_radius_for(labels.spacing(), override_radius);
  out.mask = dilate(binary_closing(derive_brain_mask(labels)), out.radius);
  out.labels = add_extracerebral_label(labels, out.mask);
  return out;
}

}  // namespace uhfsynth
