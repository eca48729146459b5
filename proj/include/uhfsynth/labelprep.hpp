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

#include <optional>

#include "uhfsynth/volume.hpp"

namespace uhfsynth {

/// Binary brain mask; 1 inside, 0 outside.
using BrainMask = MaskVolume;

/// Mask of all nonzero labels. Throws DataError("empty segmentation") when
/// every label is zero.
BrainMask derive_brain_mask(const LabelVolume& labels);

/// One dilation followed by one erosion with the full 3x3x3 element.
/// Dilation clips at the grid border and erosion treats out-of-grid voxels as
/// set, so the result always contains the input.
BrainMask binary_closing(const BrainMask& mask);

/// Sets every voxel within Chebyshev distance `radius` of a set voxel.
BrainMask dilate(const BrainMask& mask, int radius);

/// Sets every voxel whose full Chebyshev neighbourhood of `radius` is set;
/// out-of-grid voxels count as set.
BrainMask erode(const BrainMask& mask, int radius);

/// Dilation radius used for a label map of the given voxel size: 5 voxels
/// up to 0.7 mm, 4 above. `override_radius` wins when given.
int dilation_radius_for(const Vec3& spacing, std::optional<int> override_radius = std::nullopt);

/// Labels every voxel set in `new_mask` but zero in `labels` as extra-cerebral.
LabelVolume add_extracerebral_label(const LabelVolume& labels, const BrainMask& new_mask);

/// Zeroes the image outside the mask.
ScalarVolume apply_mask(const ScalarVolume& image, const BrainMask& mask);

struct PreparedLabels {
  LabelVolume labels;  // with the extra-cerebral label added
  BrainMask mask;      // closed and dilated brain mask
  int radius = 0;
};

/// Mask derivation, closing, dilation and extra-cerebral labelling in one go.
PreparedLabels prepare_labels(const LabelVolume& labels, std::optional<int> override_radius = std::nullopt);

}  // namespace uhfsynth
