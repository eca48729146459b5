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

#include <cstdint>
#include <map>

#include "uhfsynth/volume.hpp"

namespace uhfsynth {

struct ResampleSpec {
  Vec3 target_spacing{0.7, 0.7, 0.7};

  static ResampleSpec isotropic(double mm) { return {{mm, mm, mm}}; }
};

/// Output grid for a resampling: dims = round(dims * spacing / target) and an
/// affine whose voxel centres cover the same world extent as the input.
struct ResampleGrid {
  Dims dims{};
  Affine affine;
  /// Continuous input index of output voxel j along each axis: offset + j * step.
  Vec3 offset{};
  Vec3 step{};
};

ResampleGrid resample_grid(const Dims& dims, const Affine& affine, const ResampleSpec& spec);

/// Separable Catmull-Rom cubic interpolation with clamped edges.
ScalarVolume resample_image(const ScalarVolume& img, const ResampleSpec& spec);

/// Trilinear interpolation of each label's indicator followed by argmax
/// (ties go to the lowest label).
LabelVolume resample_labelmap(const LabelVolume& labels, const ResampleSpec& spec);

/// Interpolated indicator volume per label present in the input.
std::map<std::uint16_t, Volume<double>> onehot_interpolate(const LabelVolume& labels, const ResampleSpec& spec);

}  // namespace uhfsynth
