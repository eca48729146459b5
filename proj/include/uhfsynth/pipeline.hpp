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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "uhfsynth/genmodel.hpp"
#include "uhfsynth/resample.hpp"

namespace uhfsynth {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
  GenerativeConfig generative;
  ResampleSpec resample;
  std::uint64_t seed = 0;
  int threads = 1;
  int folds = 5;
  double train_fraction = 0.8;

  void validate() const;

  /// Flat JSON object; generator parameters use their short names
  /// (a_rot, b_rot, ..., sigma2_gamma). Missing keys keep defaults and unknown
  /// keys throw ConfigError naming the key.
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Stable hex digest of the effective configuration.
  std::string hash() const;
};

GenerativeConfig generative_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GenerativeConfig& cfg);

struct FoldAssignment {
  int folds = 0;
  std::vector<std::string> subjects;
  std::vector<int> fold;  // validation fold of each subject, parallel to `subjects`
  /// Single-fold split: every subject trains and validates.
  bool degenerate = false;

  std::vector<std::string> validation(int f) const;
  std::vector<std::string> training(int f) const;
  nlohmann::json to_json() const;
};

/// Seeded shuffle followed by a contiguous k-way partition; the first
/// n % k folds receive one extra subject.
FoldAssignment split_folds(const std::vector<std::string>& subjects, int k, std::uint64_t seed);

/// Reproducibility record written next to a command's outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  PipelineConfig config;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace uhfsynth
