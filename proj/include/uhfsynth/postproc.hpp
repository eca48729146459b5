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
#include <set>
#include <utility>
#include <vector>

#include "uhfsynth/volume.hpp"

namespace uhfsynth {

/// Per-label probability volumes on a shared grid; channel c holds label c.
struct ProbabilityStack {
  std::vector<ScalarVolume> channels;

  std::size_t label_count() const { return channels.size(); }
  /// Throws DataError unless channels share geometry, are non-negative and
  /// sum to 1 (within `tol`) at every voxel.
  void validate(double tol = 1e-4) const;
};

/// Voxelwise mean of the stacks followed by argmax (ties to the lowest label).
/// The result does not depend on the order of `stacks`.
LabelVolume ensemble(const std::vector<ProbabilityStack>& stacks, int threads = 1);

/// Connected components (26-connectivity) of the voxels equal to `label`.
/// Component ids start at 1 in order of each component's first voxel in scan
/// order; 0 marks voxels outside the label.
struct Components {
  std::vector<std::uint32_t> id;   // per voxel
  std::vector<std::size_t> size;   // size[c] for c >= 1; size[0] unused
  std::size_t count() const { return size.empty() ? 0 : size.size() - 1; }
};

Components connected_components(const LabelVolume& labels, std::uint16_t label);

/// Keeps only the largest 26-connected component of `label`; other components
/// become background. On equal sizes the component reached first in scan
/// order wins.
LabelVolume largest_component(const LabelVolume& labels, std::uint16_t label);

/// Labels for which keep-largest-component is applied.
struct PostprocPolicy {
  std::set<std::uint16_t> labels;
};

/// Enables a label when the mean Dice over the validation pairs with
/// keep-largest-component strictly exceeds the mean Dice without it.
/// `candidates` defaults to labels 1..35.
PostprocPolicy select_policy(const std::vector<std::pair<LabelVolume, LabelVolume>>& validation_pairs,
                             std::set<std::uint16_t> candidates = {});

LabelVolume apply_policy(const LabelVolume& labels, const PostprocPolicy& policy);

}  // namespace uhfsynth
