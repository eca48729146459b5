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

#include "doctest.h"
#include "support.hpp"
#include "uhfsynth/labelprep.hpp"
#include "uhfsynth/labels.hpp"

using namespace uhfsynth;

namespace {

// Brute-force Chebyshev dilation, clipped at the border.
MaskVolume oracle_dilate(const MaskVolume& m, int r) {
  MaskVolume out = m;
  for (int k = 0; k < m.dims[2]; ++k)
    for (int j = 0; j < m.dims[1]; ++j)
      for (int i = 0; i < m.dims[0]; ++i) {
        std::uint8_t v = 0;
        for (int dk = -r; dk <= r && !v; ++dk)
          for (int dj = -r; dj <= r && !v; ++dj)
            for (int di = -r; di <= r && !v; ++di)
              if (m.contains(i + di, j + dj, k + dk) && m.at(i + di, j + dj, k + dk)) v = 1;
        out.at(i, j, k) = v;
      }
  return out;
}

// Brute-force erosion; out-of-grid neighbours count as set.
MaskVolume oracle_erode(const MaskVolume& m, int r) {
  MaskVolume out = m;
  for (int k = 0; k < m.dims[2]; ++k)
    for (int j = 0; j < m.dims[1]; ++j)
      for (int i = 0; i < m.dims[0]; ++i) {
        std::uint8_t v = 1;
        for (int dk = -r; dk <= r && v; ++dk)
          for (int dj = -r; dj <= r && v; ++dj)
            for (int di = -r; di <= r && v; ++di)
              if (m.contains(i + di, j + dj, k + dk) && !m.at(i + di, j + dj, k + dk)) v = 0;
        out.at(i, j, k) = v;
      }
  return out;
}

MaskVolume random_mask(Dims d, double p, std::uint64_t seed) {
  MaskVolume m = testing::mask_grid(d);
  RandomStream rng(seed, 0);
  for (auto& v : m.data) v = rng.uniform() < p ? 1 : 0;
  return m;
}

bool subset(const MaskVolume& a, const MaskVolume& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.data[i] && !b.data[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("label table") {
  REQUIRE(kLabelTable.size() == 36);
  for (std::size_t i = 0; i < kLabelTable.size(); ++i) CHECK(kLabelTable[i].index == i + 1);
  CHECK(kLabelTable[kExtraCerebral - 1].index == 36);
  CHECK(kLabelTable[kWmHypointensities - 1].index == 35);
}

TEST_CASE("derive brain mask") {
  auto l = testing::label_grid({4, 4, 4});
  CHECK_THROWS_WITH_AS(derive_brain_mask(l), "empty segmentation", DataError);
  l.at(1, 2, 3) = 5;
  auto m = derive_brain_mask(l);
  CHECK(std::count(m.data.begin(), m.data.end(), 1) == 1);
  CHECK(m.at(1, 2, 3) == 1);
  l.at(0, 0, 0) = 36;
  l.at(3, 3, 3) = 2;
  m = derive_brain_mask(l);
  CHECK(std::count(m.data.begin(), m.data.end(), 1) ==
        std::count_if(l.data.begin(), l.data.end(), [](auto v) { return v != 0; }));
}

TEST_CASE("dilation") {
  auto m = testing::mask_grid({7, 7, 7});
  m.at(3, 3, 3) = 1;
  CHECK(dilate(m, 0).data == m.data);
  const auto d1 = dilate(m, 1);
  CHECK(std::count(d1.data.begin(), d1.data.end(), 1) == 27);
  CHECK(d1.data == oracle_dilate(m, 1).data);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_mask({11, 9, 8}, 0.03, seed);
    for (int radius = 1; radius <= 3; ++radius) CHECK(dilate(r, radius).data == oracle_dilate(r, radius).data);
    CHECK(dilate(r, 3).data == dilate(dilate(r, 1), 2).data);
    CHECK(erode(r, 1).data == oracle_erode(r, 1).data);
  }
  CHECK_THROWS(dilate(m, -1));
}

TEST_CASE("closing fills a cavity and never removes voxels") {
  auto m = testing::mask_grid({9, 9, 9});
  for (int k = 2; k < 7; ++k)
    for (int j = 2; j < 7; ++j)
      for (int i = 2; i < 7; ++i) m.at(i, j, k) = 1;
  auto solid = m;
  m.at(4, 4, 4) = 0;
  const auto closed = binary_closing(m);
  CHECK(closed.at(4, 4, 4) == 1);
  CHECK(closed.data == oracle_erode(oracle_dilate(m, 1), 1).data);
  CHECK(binary_closing(solid).data == solid.data);

  const auto empty = testing::mask_grid({5, 5, 5});
  CHECK(binary_closing(empty).data == empty.data);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_mask({10, 10, 10}, 0.3, seed + 10);
    const auto c = binary_closing(r);
    CHECK(subset(r, c));
    CHECK(c.data == oracle_erode(oracle_dilate(r, 1), 1).data);
  }
}

TEST_CASE("morphology is monotone") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto small = random_mask({8, 8, 8}, 0.15, seed + 100);
    auto big = small;
    const auto extra = random_mask({8, 8, 8}, 0.1, seed + 200);
    for (std::size_t i = 0; i < big.size(); ++i) big.data[i] |= extra.data[i];
    CHECK(subset(binary_closing(small), binary_closing(big)));
    CHECK(subset(dilate(small, 2), dilate(big, 2)));
  }
}

TEST_CASE("dilation radius rule") {
  CHECK(dilation_radius_for({0.6, 0.6, 0.6}) == 5);
  CHECK(dilation_radius_for({0.9, 0.9, 0.9}) == 4);
  CHECK(dilation_radius_for({0.7, 0.7, 0.7}) == 5);
  CHECK(dilation_radius_for({0.7f, 0.7f, 0.7f}) == 5);
  CHECK(dilation_radius_for({1.0, 1.0, 1.0}) == 4);
  CHECK(dilation_radius_for({0.9, 0.9, 0.9}, 2) == 2);
  CHECK_THROWS_AS(dilation_radius_for({0.0, 1.0, 1.0}), DataError);
}

TEST_CASE("extra-cerebral shell") {
  auto l = testing::label_grid({7, 7, 7});
  for (int k = 2; k < 5; ++k)
    for (int j = 2; j < 5; ++j)
      for (int i = 2; i < 5; ++i) l.at(i, j, k) = static_cast<std::uint16_t>(1 + (i + j + k) % 3);
  const auto mask = derive_brain_mask(l);
  const auto same = add_extracerebral_label(l, mask);
  CHECK(std::count(same.data.begin(), same.data.end(), 36) == 0);

  const auto grown = dilate(binary_closing(mask), 1);
  const auto out = add_extracerebral_label(l, grown);
  std::size_t shell = 0, expected = 0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (grown.data[i] && !mask.data[i]) ++expected;
    if (out.data[i] == 36) ++shell;
    if (l.data[i] != 0) CHECK(out.data[i] == l.data[i]);
    if (!grown.data[i]) CHECK(out.data[i] == 0);
  }
  CHECK(expected == 98);
  CHECK(shell == 98);

  const auto p = prepare_labels(l, 1);
  CHECK(p.labels.data == out.data);
  CHECK(p.radius == 1);

  CHECK_THROWS_AS(add_extracerebral_label(l, testing::mask_grid({6, 7, 7})), DataError);
}

TEST_CASE("apply mask") {
  auto img = testing::scalar_grid({4, 4, 4}, 1.0, 3.0f);
  auto full = testing::mask_grid({4, 4, 4});
  std::fill(full.data.begin(), full.data.end(), 1);
  CHECK(apply_mask(img, full).data == img.data);
  const auto none = apply_mask(img, testing::mask_grid({4, 4, 4}));
  CHECK(std::all_of(none.data.begin(), none.data.end(), [](float v) { return v == 0.0f; }));
  auto half = testing::mask_grid({4, 4, 4});
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 2; ++i) half.at(i, j, k) = 1;
  const auto h = apply_mask(img, half);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) CHECK(h.at(i, j, k) == (i < 2 ? 3.0f : 0.0f));
  CHECK_THROWS_AS(apply_mask(img, testing::mask_grid({4, 4, 5})), DataError);
}
