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
#include <string>
#include <vector>

#include "uhfsynth/volume.hpp"

namespace uhfsynth {

struct RoiVolumeRecord {
  std::string subject;
  std::uint16_t label = 0;
  double raw_mm3 = 0;
  double tiv_mm3 = 0;
  double normalized = 0;  // raw_mm3 / tiv_mm3
};

/// Voxel count of `label` times the voxel volume.
double roi_volume(const LabelVolume& labels, std::uint16_t label);

/// raw / tiv; throws DataError when tiv is not positive.
double normalize_volume(double raw_mm3, double tiv_mm3);

struct GroupTestResult {
  double u = 0;          // Mann-Whitney U of the first group
  double p_value = 1;    // two-sided
  bool exact = false;    // enumeration rather than normal approximation
  double threshold = 0;  // significance threshold used
  bool significant = false;
};

/// Mann-Whitney U test with midranks. Exact two-sided p (min(1, 2 * smaller
/// tail)) when the groups total at most 12 values without ties; otherwise the
/// normal approximation with tie and continuity corrections. `threshold` is
/// the significance level the p-value is compared against (p < threshold).
GroupTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double threshold = 0.05);

/// Number of rank assignments of a group of size `na` out of `na + nb` whose
/// U statistic equals u, for u = 0..na*nb.
std::vector<double> u_distribution(int na, int nb);

/// alpha / m.
double bonferroni(double alpha, int tests);

}  // namespace uhfsynth
