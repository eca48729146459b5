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
#include <span>
#include <vector>

#include "uhfsynth/volume.hpp"

namespace uhfsynth {

/// Binary mask of voxels equal to `label`.
MaskVolume label_mask(const LabelVolume& labels, std::uint16_t label);

/// Dice overlap 2|G n P| / (|G| + |P|) of two masks on a common grid; two
/// empty sets give 1.
double dice(std::span<const std::uint8_t> g, std::span<const std::uint8_t> p);
double dice(const LabelVolume& gt, const LabelVolume& pred, std::uint16_t label);

/// Voxel-centre coordinates (index * spacing, mm) of every segment voxel with
/// at least one 6-neighbour outside the segment or outside the grid.
std::vector<Vec3> extract_surface(const MaskVolume& segment, const Vec3& spacing);
inline std::vector<Vec3> extract_surface(const MaskVolume& segment) {
  return extract_surface(segment, segment.spacing());
}

/// Symmetric average surface distance in mm. NaN when either segment is
/// empty.
double average_surface_distance(const MaskVolume& g, const MaskVolume& p, const Vec3& spacing);

struct MetricRecord {
  std::uint16_t label = 0;
  double dsc = 0;
  double asd = 0;  // NaN when the label is missing from one side
  bool absent_in_both = false;
};

/// Labels scored by default: every structure except WM-hypointensities and the
/// extra-cerebral label (1..34).
std::vector<std::uint16_t> default_eval_labels();

/// One record per label. Missing from one side: (0, NaN). Missing from both:
/// (1, 0) with absent_in_both set.
std::vector<MetricRecord> evaluate(const LabelVolume& gt, const LabelVolume& pred,
                                   const std::vector<std::uint16_t>& labels = default_eval_labels());

struct AggregateSummary {
  double median = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t n = 0;  // finite values used
};

/// Median of the finite values with a percentile-bootstrap 95% interval of the
/// median. NaNs are dropped; all-NaN input throws DataError.
AggregateSummary aggregate(const std::vector<double>& values, std::uint64_t seed = 0, int resamples = 10000);

/// Median of a non-empty list (mean of the middle pair for even sizes).
double median(std::vector<double> values);

}  // namespace uhfsynth
