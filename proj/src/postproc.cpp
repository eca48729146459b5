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

#include "uhfsynth/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uhfsynth/metrics.hpp"
#include "uhfsynth/parallel.hpp"

namespace uhfsynth {

void ProbabilityStack::validate(double tol) const {
  if (channels.empty()) throw DataError("probability stack has no channels");
  for (const auto& c : channels) {
    uhfsynth::validate(c);
    require_same_geometry(channels.front(), c, "probability channels");
  }
  const std::size_t n = channels.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (const auto& c : channels) {
      const float p = c.data[i];
      if (!(p >= 0.0f)) throw DataError("negative or non-finite probability at voxel " + std::to_string(i));
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw DataError("probabilities do not sum to 1 at voxel " + std::to_string(i));
  }
}

LabelVolume ensemble(const std::vector<ProbabilityStack>& stacks, int threads) {
  if (stacks.empty()) throw DataError("ensemble needs at least one probability stack");
  const ProbabilityStack& first = stacks.front();
  for (const auto& s : stacks) {
    s.validate();
    if (s.label_count() != first.label_count()) throw DataError("probability stacks have different label sets");
    require_same_geometry(first.channels.front(), s.channels.front(), "probability stacks");
  }
  const ScalarVolume& ref = first.channels.front();
  LabelVolume out(ref.dims, ref.affine);
  const std::size_t n_labels = first.label_count();
  const std::size_t n_stacks = stacks.size();
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<float> values(n_stacks);
    for (std::size_t i = begin; i < end; ++i) {
      double best = -1;
      std::size_t best_label = 0;
      for (std::size_t l = 0; l < n_labels; ++l) {
        for (std::size_t s = 0; s < n_stacks; ++s) values[s] = stacks[s].channels[l].data[i];
        // Summing in sorted order makes the mean independent of stack order.
        if (n_stacks > 2) std::sort(values.begin(), values.end());
        double sum = 0;
        for (float v : values) sum += v;
        if (sum > best) {
          best = sum;
          best_label = l;
        }
      }
      out.data[i] = static_cast<std::uint16_t>(best_label);
    }
  });
  return out;
}

namespace {

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  std::uint32_t root = x;
  while (parent[root] != root) root = parent[root];
  while (parent[x] != root) {
    const std::uint32_t next = parent[x];
    parent[x] = root;
    x = next;
  }
  return root;
}

void unite(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  // Smaller provisional id (earlier in scan order) becomes the root.
  if (a < b) parent[b] = a;
  else parent[a] = b;
}

}  // namespace

Components connected_components(const LabelVolume& labels, std::uint16_t label) {
  const Dims& d = labels.dims;
  Components out;
  out.id.assign(labels.size(), 0);
  std::vector<std::uint32_t> parent{0};

  // Previously visited half of the 26-neighbourhood.
  static constexpr std::array<std::array<int, 3>, 13> kBack{{{-1, -1, -1}, {0, -1, -1}, {1, -1, -1},
                                                             {-1, 0, -1}, {0, 0, -1}, {1, 0, -1},
                                                             {-1, 1, -1}, {0, 1, -1}, {1, 1, -1},
                                                             {-1, -1, 0}, {0, -1, 0}, {1, -1, 0},
                                                             {-1, 0, 0}}};
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const std::size_t idx = labels.index(i, j, k);
        if (labels.data[idx] != label) continue;
        std::uint32_t assigned = 0;
        for (const auto& o : kBack) {
          const int ni = i + o[0], nj = j + o[1], nk = k + o[2];
          if (!labels.contains(ni, nj, nk)) continue;
          const std::uint32_t nb = out.id[labels.index(ni, nj, nk)];
          if (nb == 0) continue;
          if (assigned == 0) assigned = nb;
          else unite(parent, assigned, nb);
        }
        if (assigned == 0) {
          assigned = static_cast<std::uint32_t>(parent.size());
          parent.push_back(assigned);
        }
        out.id[idx] = assigned;
      }
    }
  }

  // Final ids in order of first appearance, which matches root order.
  std::vector<std::uint32_t> final_id(parent.size(), 0);
  out.size.assign(1, 0);
  for (std::uint32_t p = 1; p < parent.size(); ++p) {
    const std::uint32_t root = find_root(parent, p);
    if (root == p) {
      final_id[p] = static_cast<std::uint32_t>(out.size.size());
      out.size.push_back(0);
    }
  }
  for (auto& v : out.id) {
    if (v == 0) continue;
    v = final_id[find_root(parent, v)];
    ++out.size[v];
  }
  return out;
}

LabelVolume largest_component(const LabelVolume& labels, std::uint16_t label) {
  const Components comps = connected_components(labels, label);
  if (comps.count() <= 1) return labels;
  std::size_t keep = 1;
  for (std::size_t c = 2; c < comps.size.size(); ++c)
    if (comps.size[c] > comps.size[keep]) keep = c;
  LabelVolume out = labels;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (comps.id[i] != 0 && comps.id[i] != keep) out.data[i] = 0;
  return out;
}

PostprocPolicy select_policy(const std::vector<std::pair<LabelVolume, LabelVolume>>& validation_pairs,
                             std::set<std::uint16_t> candidates) {
  if (validation_pairs.empty()) throw DataError("policy selection needs at least one validation pair");
  if (candidates.empty())
    for (std::uint16_t l = 1; l <= 35; ++l) candidates.insert(l);
  for (const auto& [gt, pred] : validation_pairs) require_same_geometry(gt, pred, "validation pair");

  PostprocPolicy policy;
  for (auto label : candidates) {
    double with = 0, without = 0;
    for (const auto& [gt, pred] : validation_pairs) {
      without += dice(gt, pred, label);
      with += dice(gt, largest_component(pred, label), label);
    }
    const double n = static_cast<double>(validation_pairs.size());
    if (with / n > without / n) policy.labels.insert(label);
  }
  return policy;
}

LabelVolume apply_policy(const LabelVolume& labels, const PostprocPolicy& policy) {
  LabelVolume out = labels;
  for (auto label : policy.labels) out = largest_component(out, label);
  return out;
}

}  // namespace uhfsynth
