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

#include <map>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "uhfsynth/genmodel.hpp"
#include "uhfsynth/labelprep.hpp"

using namespace uhfsynth;

namespace {

// Applies scale, shear, Rx, Ry, Rz and translation one after another.
Vec3 stepwise_transform(const Vec3& rot, const Vec3& sc, const Vec3& sh, const Vec3& tr, Vec3 p) {
  for (int a = 0; a < 3; ++a) p[a] *= sc[a];
  p = {p[0] + sh[0] * p[1] + sh[1] * p[2], p[1] + sh[2] * p[2], p[2]};
  const double d = std::numbers::pi / 180.0;
  auto rotate = [](double& u, double& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double nu = c * u - s * v, nv = s * u + c * v;
    u = nu;
    v = nv;
  };
  rotate(p[1], p[2], rot[0] * d);  // about x
  rotate(p[2], p[0], rot[1] * d);  // about y
  rotate(p[0], p[1], rot[2] * d);  // about z
  for (int a = 0; a < 3; ++a) p[a] += tr[a];
  return p;
}

LabelVolume two_blob_labels(Dims d) {
  auto l = testing::label_grid(d);
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i) {
        const double x = i - d[0] / 2.0, y = j - d[1] / 2.0, z = k - d[2] / 2.0;
        const double r = std::sqrt(x * x + y * y + z * z);
        if (r < d[0] * 0.2) l.at(i, j, k) = 17;
        else if (r < d[0] * 0.35) l.at(i, j, k) = x < 0 ? 2 : 3;
        else if (r < d[0] * 0.4) l.at(i, j, k) = 36;
      }
  return l;
}

}  // namespace

TEST_CASE("generator defaults and validation") {
  const GenerativeConfig c;
  CHECK(c.a_rot == -20);
  CHECK(c.b_rot == 20);
  CHECK(c.a_sc == 0.8);
  CHECK(c.b_sc == 1.2);
  CHECK(c.a_sh == -0.015);
  CHECK(c.b_sh == 0.015);
  CHECK(c.a_tr == -30);
  CHECK(c.b_tr == 30);
  CHECK(c.b_nonlin == 4.0);
  CHECK(c.a_mu == 0);
  CHECK(c.b_mu == 255);
  CHECK(c.a_sigma == 0);
  CHECK(c.b_sigma == 35);
  CHECK(c.b_B == 0.9);
  CHECK(c.sigma2_gamma == 0.4);
  CHECK_NOTHROW(c.validate());

  GenerativeConfig bad;
  bad.a_rot = 30;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.b_nonlin = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.sigma2_gamma = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.nonlin_control_points = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("affine composition") {
  const auto id = AffineSample::identity();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(id.matrix[r][c] == doctest::Approx(r == c ? 1.0 : 0.0));

  RandomStream rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    const Vec3 rot{rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40)};
    const Vec3 sc{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    const Vec3 sh{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    const Vec3 tr{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30)};
    const Vec3 p{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec3 got = compose_affine(rot, sc, sh, tr).apply(p);
    const Vec3 want = stepwise_transform(rot, sc, sh, tr, p);
    for (int a = 0; a < 3; ++a) CHECK(got[a] == doctest::Approx(want[a]).epsilon(1e-12));
  }
}

TEST_CASE("affine sampling bounds and determinism") {
  const GenerativeConfig cfg;
  RandomStream rng(11, 0);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto s = sample_affine(cfg, rng);
    for (int a = 0; a < 3; ++a) {
      violations += s.rotation_deg[a] < -20 || s.rotation_deg[a] > 20;
      violations += s.scale[a] < 0.8 || s.scale[a] > 1.2;
      violations += s.shear[a] < -0.015 || s.shear[a] > 0.015;
      violations += s.translation_mm[a] < -30 || s.translation_mm[a] > 30;
    }
  }
  CHECK(violations == 0);

  RandomStream a(3, 1), b(3, 1);
  CHECK(sample_affine(cfg, a).matrix == sample_affine(cfg, b).matrix);

  RandomStream d(3, 1);
  const auto ident = sample_affine(GenerativeConfig::disabled(), d);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(ident.matrix[r][c] == doctest::Approx(r == c ? 1.0 : 0.0));
}

TEST_CASE("nonlinear field") {
  GenerativeConfig off;
  off.b_nonlin = 0;
  RandomStream rng(1, 2);
  CHECK(sample_nonlinear_field(off, rng, {8, 8, 8}, {1, 1, 1}).is_zero());

  const GenerativeConfig cfg;
  RandomStream a(9, 0), b(9, 0);
  const auto fa = sample_nonlinear_field(cfg, a, {12, 10, 9}, {1, 1, 1});
  const auto fb = sample_nonlinear_field(cfg, b, {12, 10, 9}, {1, 1, 1});
  CHECK(fa.displacement == fb.displacement);
  CHECK(fa.control_points == 10);

  RandomStream many(21, 0);
  double max_mag = 0;
  bool finite = true;
  for (int t = 0; t < 1000; ++t) {
    const auto f = sample_nonlinear_field(cfg, many, {12, 12, 12}, {1, 1, 1});
    for (int a = 0; a < 3; ++a) CHECK(f.stddev_mm[a] <= cfg.b_nonlin);
    for (std::size_t i = 0; i < f.displacement[0].size(); ++i) {
      const double x = f.displacement[0][i], y = f.displacement[1][i], z = f.displacement[2][i];
      finite = finite && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
      max_mag = std::max(max_mag, std::sqrt(x * x + y * y + z * z));
    }
  }
  CHECK(finite);
  CHECK(max_mag > 0);
  CHECK(max_mag <= 6 * cfg.b_nonlin);
}

TEST_CASE("deform label map") {
  auto l = testing::label_grid({10, 10, 10});
  for (std::size_t i = 0; i < l.size(); ++i) l.data[i] = static_cast<std::uint16_t>(i % 5);
  CHECK(deform_labelmap(l, AffineSample::identity(), zero_field(l.dims)).data == l.data);

  // Backward warp: output x reads source x + t, so content moves by -t.
  auto marker = testing::label_grid({10, 10, 10});
  marker.at(5, 4, 4) = 9;
  const auto moved = deform_labelmap(marker, compose_affine({}, {1, 1, 1}, {}, {2, 0, 0}), zero_field(marker.dims));
  CHECK(moved.at(3, 4, 4) == 9);
  CHECK(std::count(moved.data.begin(), moved.data.end(), 9) == 1);

  // Same rule at 0.5 mm: 2 mm is 4 voxels.
  auto fine = testing::label_grid({12, 12, 12}, 0.5);
  fine.at(8, 6, 6) = 4;
  const auto fmoved = deform_labelmap(fine, compose_affine({}, {1, 1, 1}, {}, {2, 0, 0}), zero_field(fine.dims));
  CHECK(fmoved.at(4, 6, 6) == 4);

  // Field-only shift matches the same translation through the affine.
  auto field = zero_field(marker.dims);
  std::fill(field.displacement[1].begin(), field.displacement[1].end(), -3.0f);
  const auto fshift = deform_labelmap(marker, AffineSample::identity(), field);
  CHECK(fshift.at(5, 7, 4) == 9);

  const auto l2 = two_blob_labels({24, 24, 24});
  RandomStream rng(4, 4);
  const GenerativeConfig cfg;
  for (int t = 0; t < 5; ++t) {
    const auto aff = sample_affine(cfg, rng);
    const auto f = sample_nonlinear_field(cfg, rng, l2.dims, l2.spacing());
    const auto out = deform_labelmap(l2, aff, f, 1 + t);
    auto in_domain = label_domain(l2);
    in_domain.insert(0);
    for (auto v : label_domain(out)) CHECK(in_domain.count(v) == 1);
    CHECK(out.data == deform_labelmap(l2, aff, f, 1).data);
  }
  CHECK_THROWS_AS(deform_labelmap(l2, AffineSample::identity(), zero_field({3, 3, 3})), DataError);
}

TEST_CASE("intensity prior bounds") {
  const GenerativeConfig cfg;
  RandomStream rng(2, 2);
  for (int t = 0; t < 500; ++t) {
    const auto p = sample_intensity_prior(cfg, rng);
    REQUIRE(p.mean.size() == 37);
    for (std::size_t l = 0; l < 37; ++l) {
      CHECK(p.mean[l] >= 0);
      CHECK(p.mean[l] <= 255);
      CHECK(p.stddev[l] >= 0);
      CHECK(p.stddev[l] <= 35);
    }
  }
}

TEST_CASE("sample intensities") {
  IntensityPrior prior;
  prior.mean.assign(37, 0.0);
  prior.stddev.assign(37, 0.0);
  prior.mean[1] = 50;
  prior.mean[2] = 200;
  RandomStream rng(1, 1);

  auto one = testing::label_grid({4, 4, 4});
  std::fill(one.data.begin(), one.data.end(), 1);
  const auto c = sample_intensities(one, prior, rng);
  CHECK(std::all_of(c.data.begin(), c.data.end(), [&](float v) { return v == c.data[0]; }));

  auto two = one;
  for (std::size_t i = 0; i < two.size(); i += 2) two.data[i] = 2;
  const auto t = sample_intensities(two, prior, rng);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.data[i] == (two.data[i] == 2 ? 1.0f : 0.0f));

  // Raw draws: per-label empirical mean within 4 sigma / sqrt(N).
  prior.stddev[1] = 12;
  prior.stddev[2] = 30;
  auto big = testing::label_grid({64, 64, 64});
  for (std::size_t i = 0; i < big.size(); ++i) big.data[i] = (i / 64) % 2 ? 2 : 1;
  const auto raw = draw_intensities(big, prior, rng, 4);
  double sum[3] = {0, 0, 0};
  double n[3] = {0, 0, 0};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    sum[big.data[i]] += raw.data[i];
    n[big.data[i]] += 1;
  }
  for (int l = 1; l <= 2; ++l) CHECK(std::abs(sum[l] / n[l] - prior.mean[l]) < 4 * prior.stddev[l] / std::sqrt(n[l]));
  CHECK(draw_intensities(big, prior, rng, 1).data == raw.data);

  const auto norm = sample_intensities(big, prior, rng, 3);
  const auto [lo, hi] = std::minmax_element(norm.data.begin(), norm.data.end());
  CHECK(*lo == 0.0f);
  CHECK(*hi == 1.0f);

  IntensityPrior short_prior;
  short_prior.mean.assign(2, 0.0);
  short_prior.stddev.assign(2, 0.0);
  CHECK_THROWS_AS(sample_intensities(two, short_prior, rng), DataError);
}

TEST_CASE("bias field") {
  auto img = testing::scalar_grid({9, 8, 7});
  RandomStream fill(3, 3);
  for (auto& v : img.data) v = static_cast<float>(fill.uniform());

  GenerativeConfig cfg;
  cfg.b_B = 0;
  RandomStream rng(1, 0);
  CHECK(apply_bias_field(img, cfg, rng).data == img.data);

  const double c = 0.37;
  const auto field = bias_field_from_control(std::vector<double>(64, c), {4, 4, 4}, img.dims);
  for (float v : field.data) CHECK(v == doctest::Approx(std::exp(c)).epsilon(1e-6));
  const auto scaled = apply_bias_field(img, field);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(scaled.data[i] == doctest::Approx(img.data[i] * std::exp(c)).epsilon(1e-6));

  cfg.b_B = 0.9;
  auto positive = img;
  for (auto& v : positive.data) v += 0.01f;
  const auto out = apply_bias_field(positive, cfg, rng);
  double max_jump = 0;
  for (int k = 0; k < img.dims[2]; ++k)
    for (int j = 0; j < img.dims[1]; ++j)
      for (int i = 0; i < img.dims[0]; ++i) {
        const std::size_t idx = img.index(i, j, k);
        const double ratio = out.data[idx] / positive.data[idx];
        CHECK(ratio > 0);
        if (i > 0) {
          const double prev = out.data[idx - 1] / positive.data[idx - 1];
          max_jump = std::max(max_jump, std::abs(std::log(ratio) - std::log(prev)));
        }
      }
  // Smooth: neighbouring log-ratios differ far less than the field amplitude.
  CHECK(max_jump < 0.9);
}

TEST_CASE("gamma") {
  auto img = testing::scalar_grid({3, 1, 1});
  img.data = {0.0f, 0.25f, 1.0f};
  const auto sq = apply_gamma_exponent(img, 2.0);
  CHECK(sq.data[0] == 0.0f);
  CHECK(sq.data[1] == doctest::Approx(0.0625));
  CHECK(sq.data[2] == 1.0f);
  CHECK(apply_gamma_exponent(img, 1.0).data == img.data);

  GenerativeConfig cfg;
  cfg.sigma2_gamma = 0;
  RandomStream rng(0, 0);
  CHECK(apply_gamma(img, cfg, rng).data == img.data);

  auto ramp = testing::scalar_grid({50, 1, 1});
  for (int i = 0; i < 50; ++i) ramp.data[i] = static_cast<float>(i) / 49.0f;
  cfg.sigma2_gamma = 0.4;
  for (int t = 0; t < 20; ++t) {
    const auto g = apply_gamma(ramp, cfg, rng);
    for (int i = 1; i < 50; ++i) CHECK(g.data[i] >= g.data[i - 1]);
  }

  img.data[1] = 1.5f;
  CHECK_THROWS_AS(apply_gamma_exponent(img, 2.0), DataError);
}

TEST_CASE("finalize pair") {
  auto l = testing::label_grid({5, 5, 5});
  l.at(2, 2, 2) = 4;
  auto img = testing::scalar_grid({5, 5, 5}, 1.0, 0.5f);
  CHECK(finalize_pair(img, l).target.data == l.data);

  auto shell = l;
  for (int i = 0; i < 5; ++i) shell.at(i, 0, 0) = 36;
  const auto p = finalize_pair(img, shell);
  CHECK(p.target.at(2, 2, 2) == 4);
  CHECK(std::count(p.target.data.begin(), p.target.data.end(), 36) == 0);
  CHECK(p.image.data == img.data);
  CHECK(same_geometry(p.image, p.target, 0.0));
  CHECK(*label_domain(p.target).rbegin() <= 35);
}

TEST_CASE("generate sample with randomization disabled") {
  const auto l = two_blob_labels({20, 20, 20});
  const auto s = generate_sample(l, GenerativeConfig::disabled(), {1, 2, 3});
  CHECK(s.deformed.data == l.data);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(s.pair.target.data[i] == (l.data[i] == 36 ? 0 : l.data[i]));
  // Per-label constant map.
  std::map<std::uint16_t, float> value;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const auto [it, inserted] = value.emplace(l.data[i], s.pair.image.data[i]);
    CHECK(it->second == s.pair.image.data[i]);
  }
  // Ordering of values follows the sampled means.
  for (const auto& [a, va] : value)
    for (const auto& [b, vb] : value)
      if (s.prior.mean[a] < s.prior.mean[b]) CHECK(va <= vb);
}

TEST_CASE("generate sample determinism and alignment") {
  const auto l = two_blob_labels({24, 24, 24});
  const GenerativeConfig cfg;
  const auto a = generate_sample(l, cfg, {42, 7, 1}, 1);
  const auto b = generate_sample(l, cfg, {42, 7, 1}, 4);
  CHECK(a.pair.image.data == b.pair.image.data);
  CHECK(a.pair.target.data == b.pair.target.data);
  const auto c = generate_sample(l, cfg, {42, 7, 2}, 1);
  CHECK(c.pair.image.data != a.pair.image.data);
  CHECK(a.pair.image.dims == l.dims);
  CHECK(same_geometry(a.pair.image, l, 0.0));

  GenerativeConfig aligned = cfg;
  aligned.a_sigma = aligned.b_sigma = 0;
  aligned.b_B = 0;
  const auto s = generate_sample(l, aligned, {5, 0, 0});
  std::map<float, std::set<std::uint16_t>> decoded;
  for (std::size_t i = 0; i < l.size(); ++i) decoded[s.pair.image.data[i]].insert(s.deformed.data[i]);
  std::size_t ambiguous = 0;
  for (const auto& [v, labels] : decoded) ambiguous += labels.size() > 1;
  // Distinct sampled means make every intensity map to one label.
  CHECK(ambiguous == 0);
}
