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

#include "uhfsynth/volumetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uhfsynth {

double roi_volume(const LabelVolume& labels, std::uint16_t label) {
  const auto count = std::count(labels.data.begin(), labels.data.end(), label);
  return static_cast<double>(count) * labels.voxel_volume();
}

double normalize_volume(double raw_mm3, double tiv_mm3) {
  if (!(tiv_mm3 > 0)) throw DataError("TIV must be positive");
  return raw_mm3 / tiv_mm3;
}

std::vector<double> u_distribution(int na, int nb) {
  // counts[m][u] over growing group sizes: placing the largest value in group
  // a adds nb to U, placing it in group b adds nothing.
  const int max_u = na * nb;
  std::vector<std::vector<std::vector<double>>> table(
      static_cast<std::size_t>(na) + 1, std::vector<std::vector<double>>(static_cast<std::size_t>(nb) + 1));
  for (int m = 0; m <= na; ++m) {
    for (int n = 0; n <= nb; ++n) {
      auto& cur = table[m][n];
      cur.assign(static_cast<std::size_t>(m * n) + 1, 0.0);
      if (m == 0 || n == 0) {
        cur[0] = 1.0;
        continue;
      }
      const auto& with_a = table[m - 1][n];
      const auto& with_b = table[m][n - 1];
      for (std::size_t u = 0; u < with_a.size(); ++u) cur[u + static_cast<std::size_t>(n)] += with_a[u];
      for (std::size_t u = 0; u < with_b.size(); ++u) cur[u] += with_b[u];
    }
  }
  auto out = table[na][nb];
  out.resize(static_cast<std::size_t>(max_u) + 1, 0.0);
  return out;
}

GroupTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double threshold) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney U needs two non-empty groups");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  for (const auto& [v, g] : pooled)
    if (!std::isfinite(v)) throw DataError("Mann-Whitney U needs finite samples");
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0;
  double tie_term = 0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t q = i; q < j; ++q)
      if (pooled[q].second == 0) rank_sum_a += midrank;
    tie_term += t * t * t - t;
    i = j;
  }

  GroupTestResult r;
  r.threshold = threshold;
  r.u = rank_sum_a - 0.5 * static_cast<double>(na * (na + 1));
  const double mean_u = 0.5 * static_cast<double>(na * nb);

  if (n <= 12 && tie_term == 0) {
    const auto counts = u_distribution(static_cast<int>(na), static_cast<int>(nb));
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u_obs = static_cast<std::size_t>(std::llround(r.u));
    double lower = 0, upper = 0;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      if (u <= u_obs) lower += counts[u];
      if (u >= u_obs) upper += counts[u];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    r.exact = true;
  } else {
    const double nd = static_cast<double>(n);
    const double var = static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (var <= 0) {
      r.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::abs(r.u - mean_u) - 0.5) / std::sqrt(var);
      r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
  }
  r.significant = r.p_value < threshold;
  return r;
}

double bonferroni(double alpha, int tests) {
  if (tests < 1) throw ConfigError("Bonferroni correction needs at least one test");
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  return alpha / tests;
}

}  // namespace uhfsynth
