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

#include "uhfsynth/volume.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "uhfsynth/log.hpp"

namespace uhfsynth {

namespace {

// World axis (0 = x/LR, 1 = y/PA, 2 = z/IS) an orientation letter refers to.
int world_axis_of(char c) {
  switch (c) {
    case 'L': case 'R': return 0;
    case 'P': case 'A': return 1;
    case 'I': case 'S': return 2;
    default: return -1;
  }
}

char letter_for(int world_axis, bool positive) {
  static constexpr char kPos[] = {'R', 'A', 'S'};
  static constexpr char kNeg[] = {'L', 'P', 'I'};
  return positive ? kPos[world_axis] : kNeg[world_axis];
}

bool is_positive(char c) { return c == 'R' || c == 'A' || c == 'S'; }

}  // namespace

Vec3 Affine::apply(const Vec3& ijk) const {
  Vec3 out{};
  for (int r = 0; r < 3; ++r) out[r] = m[r][0] * ijk[0] + m[r][1] * ijk[1] + m[r][2] * ijk[2] + m[r][3];
  return out;
}

Vec3 Affine::spacing() const {
  Vec3 s{};
  for (int c = 0; c < 3; ++c) s[c] = std::sqrt(m[0][c] * m[0][c] + m[1][c] * m[1][c] + m[2][c] * m[2][c]);
  return s;
}

bool Affine::finite() const {
  for (const auto& row : m)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

OrientationCode::OrientationCode(std::string_view code) {
  if (code.size() != 3) throw ConfigError("orientation code must have three letters: '" + std::string(code) + "'");
  std::array<bool, 3> seen{};
  for (int i = 0; i < 3; ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(code[i])));
    const int w = world_axis_of(c);
    if (w < 0 || seen[w]) throw ConfigError("invalid orientation code '" + std::string(code) + "'");
    seen[w] = true;
    letters_[i] = c;
  }
}

OrientationCode OrientationCode::from_affine(const Affine& affine) {
  // Greedy assignment over the 3x3 direction block by decreasing magnitude, so
  // that strongly oblique matrices still yield a valid permutation.
  std::array<bool, 3> row_used{}, col_used{};
  std::array<char, 3> letters{'?', '?', '?'};
  for (int n = 0; n < 3; ++n) {
    double best = -1;
    int br = 0, bc = 0;
    for (int r = 0; r < 3; ++r) {
      if (row_used[r]) continue;
      for (int c = 0; c < 3; ++c) {
        if (col_used[c]) continue;
        const double norm = std::max(affine.spacing()[c], 1e-300);
        const double v = std::abs(affine.m[r][c]) / norm;
        if (v > best) {
          best = v;
          br = r;
          bc = c;
        }
      }
    }
    row_used[br] = col_used[bc] = true;
    letters[bc] = letter_for(br, affine.m[br][bc] > 0);
  }
  return OrientationCode(std::string_view(letters.data(), 3));
}

bool OrientationCode::is_oblique(const Affine& affine, double tol) {
  const Vec3 s = affine.spacing();
  for (int c = 0; c < 3; ++c) {
    int nonzero = 0;
    for (int r = 0; r < 3; ++r)
      if (std::abs(affine.m[r][c]) > tol * s[c]) ++nonzero;
    if (nonzero != 1) return true;
  }
  return false;
}

Affine make_affine(const Vec3& spacing, const OrientationCode& orientation, const Vec3& origin) {
  Affine a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) a.m[r][c] = 0;
  for (int c = 0; c < 3; ++c) {
    const int w = world_axis_of(orientation[c]);
    a.m[w][c] = is_positive(orientation[c]) ? spacing[c] : -spacing[c];
  }
  for (int r = 0; r < 3; ++r) a.m[r][3] = origin[r];
  a.m[3] = {0, 0, 0, 1};
  return a;
}

std::set<std::uint16_t> label_domain(const LabelVolume& labels) {
  std::array<bool, 65536> present{};
  for (auto v : labels.data) present[v] = true;
  std::set<std::uint16_t> out;
  for (std::size_t i = 0; i < present.size(); ++i)
    if (present[i]) out.insert(static_cast<std::uint16_t>(i));
  return out;
}

void validate_labels(const LabelVolume& labels) {
  validate(labels);
  const auto it = std::find_if(labels.data.begin(), labels.data.end(), [](auto v) { return v > kMaxLabel; });
  if (it != labels.data.end())
    throw DataError("label value " + std::to_string(*it) + " outside 0.." + std::to_string(kMaxLabel));
}

template <typename T>
Volume<T> reorient(const Volume<T>& vol, const OrientationCode& target) {
  const OrientationCode source = vol.orientation();
  if (OrientationCode::is_oblique(vol.affine))
    log::warn("oblique affine snapped to nearest axis code " + source.str());
  if (source == target) return vol;

  // For each target axis: the source axis it comes from and whether it flips.
  std::array<int, 3> src_axis{};
  std::array<bool, 3> flip{};
  for (int t = 0; t < 3; ++t) {
    for (int s = 0; s < 3; ++s) {
      if (world_axis_of(source[s]) == world_axis_of(target[t])) {
        src_axis[t] = s;
        flip[t] = source[s] != target[t];
      }
    }
  }

  Volume<T> out;
  Vec3 origin_index{};
  for (int t = 0; t < 3; ++t) {
    const int s = src_axis[t];
    out.dims[t] = vol.dims[s];
    for (int r = 0; r < 3; ++r) out.affine.m[r][t] = flip[t] ? -vol.affine.m[r][s] : vol.affine.m[r][s];
    origin_index[s] = flip[t] ? vol.dims[s] - 1 : 0;
  }
  const Vec3 origin = vol.affine.apply(origin_index);
  for (int r = 0; r < 3; ++r) out.affine.m[r][3] = origin[r];
  out.affine.m[3] = {0, 0, 0, 1};
  out.data.resize(vol.data.size());

  std::array<int, 3> src{};
  for (int k = 0; k < out.dims[2]; ++k) {
    for (int j = 0; j < out.dims[1]; ++j) {
      for (int i = 0; i < out.dims[0]; ++i) {
        const std::array<int, 3> dst{i, j, k};
        for (int t = 0; t < 3; ++t) {
          const int s = src_axis[t];
          src[s] = flip[t] ? vol.dims[s] - 1 - dst[t] : dst[t];
        }
        out.data[out.index(i, j, k)] = vol.data[vol.index(src[0], src[1], src[2])];
      }
    }
  }
  return out;
}

template Volume<float> reorient(const Volume<float>&, const OrientationCode&);
template Volume<std::uint16_t> reorient(const Volume<std::uint16_t>&, const OrientationCode&);
template Volume<std::uint8_t> reorient(const Volume<std::uint8_t>&, const OrientationCode&);

}  // namespace uhfsynth
