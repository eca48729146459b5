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

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uhfsynth/error.hpp"

namespace uhfsynth {

using Vec3 = std::array<double, 3>;
using Dims = std::array<int, 3>;

/// Highest label index that may appear in a label map (extra-cerebral).
inline constexpr std::uint16_t kMaxLabel = 36;

/// Row-major 4x4 voxel-to-world (RAS+, mm) matrix.
struct Affine {
  std::array<std::array<double, 4>, 4> m{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};

  Vec3 apply(const Vec3& ijk) const;
  Vec3 column(int axis) const { return {m[0][axis], m[1][axis], m[2][axis]}; }
  Vec3 origin() const { return {m[0][3], m[1][3], m[2][3]}; }
  /// Voxel size along each index axis (column norms).
  Vec3 spacing() const;
  bool finite() const;
};

/// Anatomical direction of increasing index along each voxel axis, e.g. "LIA".
class OrientationCode {
 public:
  /// Throws ConfigError unless the three letters cover L/R, A/P and I/S once each.
  explicit OrientationCode(std::string_view code);

  char operator[](int axis) const { return letters_[axis]; }
  std::string str() const { return {letters_.begin(), letters_.end()}; }
  bool operator==(const OrientationCode&) const = default;

  /// Nearest axis code of an affine (largest-magnitude direction cosine per column).
  static OrientationCode from_affine(const Affine& affine);
  /// True when some column is not parallel to a world axis.
  static bool is_oblique(const Affine& affine, double tol = 1e-4);

 private:
  std::array<char, 3> letters_{};
};

/// Dense 3D grid, x-fastest, with voxel-to-world geometry.
template <typename T>
struct Volume {
  using value_type = T;

  Dims dims{0, 0, 0};
  Affine affine;
  std::vector<T> data;

  Volume() = default;
  Volume(Dims d, Affine a, T fill = T{}) : dims(d), affine(a), data(voxel_count(d), fill) {}

  static std::size_t voxel_count(const Dims& d) {
    return static_cast<std::size_t>(d[0]) * static_cast<std::size_t>(d[1]) *
           static_cast<std::size_t>(d[2]);
  }

  std::size_t size() const { return data.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }
  T& at(int i, int j, int k) { return data[index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return data[index(i, j, k)]; }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }

  Vec3 spacing() const { return affine.spacing(); }
  OrientationCode orientation() const { return OrientationCode::from_affine(affine); }
  double voxel_volume() const {
    const Vec3 s = spacing();
    return s[0] * s[1] * s[2];
  }
};

using ScalarVolume = Volume<float>;
using LabelVolume = Volume<std::uint16_t>;
using MaskVolume = Volume<std::uint8_t>;

/// Axis-aligned affine with the given spacing, orientation and origin.
Affine make_affine(const Vec3& spacing, const OrientationCode& orientation, const Vec3& origin = {0, 0, 0});

/// Same dims and (to within `tol` mm) the same affine.
template <typename A, typename B>
bool same_geometry(const Volume<A>& a, const Volume<B>& b, double tol = 1e-4) {
  if (a.dims != b.dims) return false;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      if (std::abs(a.affine.m[r][c] - b.affine.m[r][c]) > tol) return false;
  return true;
}

template <typename A, typename B>
void require_same_geometry(const Volume<A>& a, const Volume<B>& b, std::string_view what) {
  if (!same_geometry(a, b)) throw DataError(std::string("geometry mismatch: ") + std::string(what));
}

/// Checks dims, finite positive spacing and data length.
template <typename T>
void validate(const Volume<T>& v) {
  for (int d : v.dims)
    if (d <= 0) throw DataError("volume dimensions must be positive");
  if (v.data.size() != Volume<T>::voxel_count(v.dims)) throw DataError("volume data length does not match dims");
  if (!v.affine.finite()) throw DataError("non-finite affine");
  for (double s : v.spacing())
    if (!(s > 0)) throw DataError("volume spacing must be positive");
}

/// Sorted set of label values present.
std::set<std::uint16_t> label_domain(const LabelVolume& labels);

/// Throws DataError if any label exceeds kMaxLabel.
void validate_labels(const LabelVolume& labels);

/// Permutes and flips axes (no interpolation) so that the result has the
/// target orientation. World coordinates of every voxel are preserved.
template <typename T>
Volume<T> reorient(const Volume<T>& vol, const OrientationCode& target);

extern template Volume<float> reorient(const Volume<float>&, const OrientationCode&);
extern template Volume<std::uint16_t> reorient(const Volume<std::uint16_t>&, const OrientationCode&);
extern template Volume<std::uint8_t> reorient(const Volume<std::uint8_t>&, const OrientationCode&);

}  // namespace uhfsynth
