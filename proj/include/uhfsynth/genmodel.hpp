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
#include <cstdint>
#include <vector>

#include "uhfsynth/random.hpp"
#include "uhfsynth/volume.hpp"

namespace uhfsynth {

/// Randomization priors of the synthetic image generator. Intervals are
/// [a_*, b_*]; rotations in degrees, translations and deformations in mm,
/// intensity bounds on a [0, 255] scale.
struct GenerativeConfig {
  double a_rot = -20, b_rot = 20;
  double a_sc = 0.8, b_sc = 1.2;
  double a_sh = -0.015, b_sh = 0.015;
  double a_tr = -30, b_tr = 30;
  double b_nonlin = 4.0;
  double a_mu = 0, b_mu = 255;
  double a_sigma = 0, b_sigma = 35;
  double b_B = 0.9;
  double sigma2_gamma = 0.4;
  // Resolution randomization (r_HR, b_res, a_alpha, b_alpha) is disabled and
  // has no fields; configs may only set those keys to null.

  int nonlin_control_points = 10;
  int bias_control_points = 4;

  /// Throws ConfigError naming the first offending parameter.
  void validate() const;

  /// Spatial intervals degenerate at identity, zero noise, no fields, no
  /// gamma. Per-label means are still drawn from [a_mu, b_mu].
  static GenerativeConfig disabled();
};

struct AffineSample {
  Vec3 rotation_deg{};
  Vec3 scale{1, 1, 1};
  Vec3 shear{};
  Vec3 translation_mm{};
  /// Maps a target point (mm, relative to the volume centre) to its source
  /// point: T * R * Sh * Sc with R = Rz * Ry * Rx and
  /// Sh = [[1, sh0, sh1], [0, 1, sh2], [0, 0, 1]].
  std::array<std::array<double, 4>, 4> matrix{};

  static AffineSample identity();
  Vec3 apply(const Vec3& p) const;
};

AffineSample compose_affine(const Vec3& rotation_deg, const Vec3& scale, const Vec3& shear, const Vec3& translation_mm);

AffineSample sample_affine(const GenerativeConfig& cfg, RandomStream& rng);

/// Dense displacement (mm) on the target grid, one array per axis.
struct DeformationField {
  Dims dims{0, 0, 0};
  std::array<std::vector<float>, 3> displacement;
  int control_points = 0;
  Vec3 stddev_mm{};

  bool is_zero() const;
};

DeformationField zero_field(const Dims& dims);

DeformationField sample_nonlinear_field(const GenerativeConfig& cfg, RandomStream& rng, const Dims& dims,
                                        const Vec3& spacing);

/// Backward nearest-neighbour warp: output voxel x takes the label found at
/// aff(x + field(x)); sources outside the grid give 0.
LabelVolume deform_labelmap(const LabelVolume& labels, const AffineSample& aff, const DeformationField& field,
                            int threads = 1);

struct IntensityPrior {
  std::vector<double> mean;    // indexed by label
  std::vector<double> stddev;  // indexed by label

  bool covers(std::uint16_t label) const { return label < mean.size() && label < stddev.size(); }
};

/// Independent uniform draws of mean and standard deviation for labels
/// 0..kMaxLabel.
IntensityPrior sample_intensity_prior(const GenerativeConfig& cfg, RandomStream& rng);

/// Gaussian noise per voxel from the label's prior, on the prior's scale.
/// Each voxel's draw depends only on its index and the stream.
ScalarVolume draw_intensities(const LabelVolume& labels, const IntensityPrior& prior, const RandomStream& rng,
                              int threads = 1);

/// draw_intensities followed by min-max normalization to [0, 1].
ScalarVolume sample_intensities(const LabelVolume& labels, const IntensityPrior& prior, const RandomStream& rng,
                                int threads = 1);

/// Min-max normalization to [0, 1]; a constant image maps to zeros.
void normalize_min_max(ScalarVolume& img);

/// Multiplicative field exp(B) where B is the B-spline upsampling of a coarse
/// control grid (log-amplitudes).
ScalarVolume bias_field_from_control(const std::vector<double>& control, const Dims& control_dims, const Dims& dims);
ScalarVolume apply_bias_field(const ScalarVolume& img, const ScalarVolume& field);
ScalarVolume apply_bias_field(const ScalarVolume& img, const GenerativeConfig& cfg, RandomStream& rng);

/// img ^ exponent. Input must lie in [0, 1].
ScalarVolume apply_gamma_exponent(const ScalarVolume& img, double exponent);
/// Draws g ~ N(0, sigma2_gamma) and applies img ^ exp(g).
ScalarVolume apply_gamma(const ScalarVolume& img, const GenerativeConfig& cfg, RandomStream& rng);

struct TrainingPair {
  ScalarVolume image;
  LabelVolume target;
};

/// Removes the extra-cerebral label from the target.
TrainingPair finalize_pair(ScalarVolume img, LabelVolume deformed);

/// Identifies one sample: master seed plus subject and sample index.
struct SampleKey {
  std::uint64_t seed = 0;
  std::uint64_t subject = 0;
  std::uint64_t index = 0;
};

/// A generated pair with the intermediate state that produced it.
struct GeneratedSample {
  TrainingPair pair;
  LabelVolume deformed;  // still carries the extra-cerebral label
  AffineSample affine;
  IntensityPrior prior;
  double gamma_exponent = 1.0;
};

/// affine -> nonlinear field -> warp -> intensities -> bias -> gamma ->
/// finalize. Deterministic in (labels, cfg, key) for any thread count.
GeneratedSample generate_sample(const LabelVolume& labels, const GenerativeConfig& cfg, const SampleKey& key,
                                int threads = 1);

inline TrainingPair generate_pair(const LabelVolume& labels, const GenerativeConfig& cfg, std::uint64_t seed,
                                  int threads = 1) {
  return generate_sample(labels, cfg, SampleKey{seed, 0, 0}, threads).pair;
}

}  // namespace uhfsynth
