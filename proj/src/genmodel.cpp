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

#include "uhfsynth/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "interp.hpp"
#include "uhfsynth/labels.hpp"
#include "uhfsynth/parallel.hpp"

namespace uhfsynth {

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity4() { return {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}; }

Mat4 multiply(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < 4; ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

void require_interval(double lo, double hi, const char* a, const char* b) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError(std::string(a) + "/" + b + " must be finite");
  if (lo > hi) throw ConfigError(std::string(a) + " must not exceed " + b);
}

void require_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0) throw ConfigError(std::string(name) + " must be a finite non-negative number");
}

// Splits the z range into slabs for the per-voxel stages.
template <typename Fn>
void for_each_slab(const Dims& dims, int threads, Fn&& fn) {
  parallel_for(static_cast<std::size_t>(dims[2]), threads, [&](std::size_t k0, std::size_t k1) {
    fn(static_cast<int>(k0), static_cast<int>(k1));
  });
}

}  // namespace

void GenerativeConfig::validate() const {
  require_interval(a_rot, b_rot, "a_rot", "b_rot");
  require_interval(a_sc, b_sc, "a_sc", "b_sc");
  if (a_sc <= 0) throw ConfigError("a_sc must be positive");
  require_interval(a_sh, b_sh, "a_sh", "b_sh");
  require_interval(a_tr, b_tr, "a_tr", "b_tr");
  require_nonnegative(b_nonlin, "b_nonlin");
  require_interval(a_mu, b_mu, "a_mu", "b_mu");
  require_interval(a_sigma, b_sigma, "a_sigma", "b_sigma");
  require_nonnegative(a_sigma, "a_sigma");
  require_nonnegative(b_B, "b_B");
  require_nonnegative(sigma2_gamma, "sigma2_gamma");
  if (nonlin_control_points < 2) throw ConfigError("nonlin_control_points must be at least 2");
  if (bias_control_points < 2) throw ConfigError("bias_control_points must be at least 2");
}

GenerativeConfig GenerativeConfig::disabled() {
  GenerativeConfig cfg;
  cfg.a_rot = cfg.b_rot = 0;
  cfg.a_sc = cfg.b_sc = 1;
  cfg.a_sh = cfg.b_sh = 0;
  cfg.a_tr = cfg.b_tr = 0;
  cfg.b_nonlin = 0;
  cfg.a_sigma = cfg.b_sigma = 0;
  cfg.b_B = 0;
  cfg.sigma2_gamma = 0;
  return cfg;
}

AffineSample AffineSample::identity() { return compose_affine({0, 0, 0}, {1, 1, 1}, {0, 0, 0}, {0, 0, 0}); }

Vec3 AffineSample::apply(const Vec3& p) const {
  Vec3 out{};
  for (int r = 0; r < 3; ++r) out[r] = matrix[r][0] * p[0] + matrix[r][1] * p[1] + matrix[r][2] * p[2] + matrix[r][3];
  return out;
}

AffineSample compose_affine(const Vec3& rotation_deg, const Vec3& scale, const Vec3& shear, const Vec3& translation_mm) {
  AffineSample s;
  s.rotation_deg = rotation_deg;
  s.scale = scale;
  s.shear = shear;
  s.translation_mm = translation_mm;

  const double deg = std::numbers::pi / 180.0;
  const double cx = std::cos(rotation_deg[0] * deg), sx = std::sin(rotation_deg[0] * deg);
  const double cy = std::cos(rotation_deg[1] * deg), sy = std::sin(rotation_deg[1] * deg);
  const double cz = std::cos(rotation_deg[2] * deg), sz = std::sin(rotation_deg[2] * deg);
  Mat4 rx = identity4(), ry = identity4(), rz = identity4();
  rx[1][1] = cx; rx[1][2] = -sx; rx[2][1] = sx; rx[2][2] = cx;
  ry[0][0] = cy; ry[0][2] = sy; ry[2][0] = -sy; ry[2][2] = cy;
  rz[0][0] = cz; rz[0][1] = -sz; rz[1][0] = sz; rz[1][1] = cz;

  Mat4 sh = identity4();
  sh[0][1] = shear[0];
  sh[0][2] = shear[1];
  sh[1][2] = shear[2];

  Mat4 sc = identity4();
  for (int a = 0; a < 3; ++a) sc[a][a] = scale[a];

  Mat4 tr = identity4();
  for (int a = 0; a < 3; ++a) tr[a][3] = translation_mm[a];

  s.matrix = multiply(tr, multiply(multiply(rz, multiply(ry, rx)), multiply(sh, sc)));
  return s;
}

AffineSample sample_affine(const GenerativeConfig& cfg, RandomStream& rng) {
  Vec3 rot{}, sc{}, sh{}, tr{};
  for (auto& v : rot) v = rng.uniform(cfg.a_rot, cfg.b_rot);
  for (auto& v : sc) v = rng.uniform(cfg.a_sc, cfg.b_sc);
  for (auto& v : sh) v = rng.uniform(cfg.a_sh, cfg.b_sh);
  for (auto& v : tr) v = rng.uniform(cfg.a_tr, cfg.b_tr);
  return compose_affine(rot, sc, sh, tr);
}

bool DeformationField::is_zero() const {
  for (const auto& comp : displacement)
    if (std::any_of(comp.begin(), comp.end(), [](float v) { return v != 0.0f; })) return false;
  return true;
}

DeformationField zero_field(const Dims& dims) {
  DeformationField f;
  f.dims = dims;
  for (auto& comp : f.displacement) comp.assign(Volume<float>::voxel_count(dims), 0.0f);
  return f;
}

DeformationField sample_nonlinear_field(const GenerativeConfig& cfg, RandomStream& rng, const Dims& dims,
                                        const Vec3& /*spacing*/) {
  DeformationField field = zero_field(dims);
  field.control_points = cfg.nonlin_control_points;
  if (cfg.b_nonlin <= 0) return field;

  const int k = cfg.nonlin_control_points;
  const Dims control_dims{k, k, k};
  const std::size_t n_control = Volume<double>::voxel_count(control_dims);
  for (int axis = 0; axis < 3; ++axis) {
    field.stddev_mm[axis] = rng.uniform(0.0, cfg.b_nonlin);
    std::vector<double> control(n_control);
    for (auto& v : control) v = rng.normal(0.0, field.stddev_mm[axis]);
    const std::vector<double> dense = detail::bspline_upsample(control, control_dims, dims);
    std::transform(dense.begin(), dense.end(), field.displacement[axis].begin(),
                   [](double v) { return static_cast<float>(v); });
  }
  return field;
}

LabelVolume deform_labelmap(const LabelVolume& labels, const AffineSample& aff, const DeformationField& field,
                            int threads) {
  validate(labels);
  if (field.dims != labels.dims) throw DataError("deformation field does not match the label grid");
  const Vec3 sp = labels.spacing();
  const Vec3 centre{(labels.dims[0] - 1) / 2.0, (labels.dims[1] - 1) / 2.0, (labels.dims[2] - 1) / 2.0};
  LabelVolume out(labels.dims, labels.affine);
  for_each_slab(labels.dims, threads, [&](int k0, int k1) {
    for (int k = k0; k < k1; ++k) {
      for (int j = 0; j < labels.dims[1]; ++j) {
        for (int i = 0; i < labels.dims[0]; ++i) {
          const std::size_t idx = labels.index(i, j, k);
          const Vec3 p{(i - centre[0]) * sp[0] + field.displacement[0][idx],
                       (j - centre[1]) * sp[1] + field.displacement[1][idx],
                       (k - centre[2]) * sp[2] + field.displacement[2][idx]};
          const Vec3 s = aff.apply(p);
          const double si = std::floor(s[0] / sp[0] + centre[0] + 0.5);
          const double sj = std::floor(s[1] / sp[1] + centre[1] + 0.5);
          const double sk = std::floor(s[2] / sp[2] + centre[2] + 0.5);
          if (si < 0 || sj < 0 || sk < 0 || si >= labels.dims[0] || sj >= labels.dims[1] || sk >= labels.dims[2]) {
            out.data[idx] = 0;
          } else {
            out.data[idx] = labels.at(static_cast<int>(si), static_cast<int>(sj), static_cast<int>(sk));
          }
        }
      }
    }
  });
  return out;
}

IntensityPrior sample_intensity_prior(const GenerativeConfig& cfg, RandomStream& rng) {
  IntensityPrior prior;
  prior.mean.resize(kMaxLabel + 1);
  prior.stddev.resize(kMaxLabel + 1);
  for (std::size_t l = 0; l <= kMaxLabel; ++l) {
    prior.mean[l] = rng.uniform(cfg.a_mu, cfg.b_mu);
    prior.stddev[l] = rng.uniform(cfg.a_sigma, cfg.b_sigma);
  }
  return prior;
}

void normalize_min_max(ScalarVolume& img) {
  if (img.data.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(img.data.begin(), img.data.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(img.data.begin(), img.data.end(), 0.0f);
    return;
  }
  const double scale = 1.0 / (hi - lo);
  for (float& v : img.data) v = static_cast<float>(std::clamp((v - lo) * scale, 0.0, 1.0));
}

ScalarVolume draw_intensities(const LabelVolume& labels, const IntensityPrior& prior, const RandomStream& rng,
                              int threads) {
  validate(labels);
  for (auto l : label_domain(labels))
    if (!prior.covers(l)) throw DataError("no intensity prior for label " + std::to_string(l));
  ScalarVolume img(labels.dims, labels.affine);
  const std::size_t plane = static_cast<std::size_t>(labels.dims[0]) * labels.dims[1];
  for_each_slab(labels.dims, threads, [&](int k0, int k1) {
    for (std::size_t idx = k0 * plane; idx < k1 * plane; ++idx) {
      const auto l = labels.data[idx];
      const double sd = prior.stddev[l];
      const double v = sd > 0 ? prior.mean[l] + sd * rng.normal_at(idx) : prior.mean[l];
      img.data[idx] = static_cast<float>(v);
    }
  });
  return img;
}

ScalarVolume sample_intensities(const LabelVolume& labels, const IntensityPrior& prior, const RandomStream& rng,
                                int threads) {
  ScalarVolume img = draw_intensities(labels, prior, rng, threads);
  normalize_min_max(img);
  return img;
}

ScalarVolume bias_field_from_control(const std::vector<double>& control, const Dims& control_dims, const Dims& dims) {
  if (control.size() != Volume<double>::voxel_count(control_dims))
    throw DataError("bias control grid size does not match its dims");
  const std::vector<double> log_field = detail::bspline_upsample(control, control_dims, dims);
  ScalarVolume field(dims, Affine{});
  for (std::size_t i = 0; i < log_field.size(); ++i) field.data[i] = static_cast<float>(std::exp(log_field[i]));
  return field;
}

ScalarVolume apply_bias_field(const ScalarVolume& img, const ScalarVolume& field) {
  if (img.dims != field.dims) throw DataError("bias field does not match the image grid");
  ScalarVolume out = img;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = img.data[i] * field.data[i];
  return out;
}

ScalarVolume apply_bias_field(const ScalarVolume& img, const GenerativeConfig& cfg, RandomStream& rng) {
  if (cfg.b_B <= 0) return img;
  const double sd = rng.uniform(0.0, cfg.b_B);
  const int k = cfg.bias_control_points;
  const Dims control_dims{k, k, k};
  std::vector<double> control(Volume<double>::voxel_count(control_dims));
  for (auto& v : control) v = rng.normal(0.0, sd);
  return apply_bias_field(img, bias_field_from_control(control, control_dims, img.dims));
}

ScalarVolume apply_gamma_exponent(const ScalarVolume& img, double exponent) {
  constexpr float kSlack = 1e-6f;
  ScalarVolume out = img;
  for (float& v : out.data) {
    if (!(v >= -kSlack && v <= 1.0f + kSlack)) throw DataError("gamma augmentation requires intensities in [0, 1]");
    v = static_cast<float>(std::pow(std::clamp(static_cast<double>(v), 0.0, 1.0), exponent));
  }
  return out;
}

ScalarVolume apply_gamma(const ScalarVolume& img, const GenerativeConfig& cfg, RandomStream& rng) {
  const double g = rng.normal() * std::sqrt(cfg.sigma2_gamma);
  return apply_gamma_exponent(img, std::exp(g));
}

TrainingPair finalize_pair(ScalarVolume img, LabelVolume deformed) {
  if (img.dims != deformed.dims) throw DataError("image and label map must share a grid");
  img.affine = deformed.affine;
  for (auto& v : deformed.data)
    if (v == kExtraCerebral) v = 0;
  return {std::move(img), std::move(deformed)};
}

GeneratedSample generate_sample(const LabelVolume& labels, const GenerativeConfig& cfg, const SampleKey& key,
                                int threads) {
  cfg.validate();
  validate_labels(labels);
  const RandomStream stream = sample_stream(key.seed, key.subject, key.index);

  GeneratedSample out;
  RandomStream affine_rng = stream.substream("affine");
  out.affine = sample_affine(cfg, affine_rng);

  RandomStream field_rng = stream.substream("nonlinear");
  const DeformationField field = sample_nonlinear_field(cfg, field_rng, labels.dims, labels.spacing());
  out.deformed = deform_labelmap(labels, out.affine, field, threads);

  RandomStream prior_rng = stream.substream("prior");
  out.prior = sample_intensity_prior(cfg, prior_rng);
  ScalarVolume img = sample_intensities(out.deformed, out.prior, stream.substream("noise"), threads);

  RandomStream bias_rng = stream.substream("bias");
  img = apply_bias_field(img, cfg, bias_rng);
  normalize_min_max(img);

  RandomStream gamma_rng = stream.substream("gamma");
  out.gamma_exponent = std::exp(gamma_rng.normal() * std::sqrt(cfg.sigma2_gamma));
  img = apply_gamma_exponent(img, out.gamma_exponent);
  normalize_min_max(img);

  out.pair = finalize_pair(std::move(img), out.deformed);
  return out;
}

}  // namespace uhfsynth
