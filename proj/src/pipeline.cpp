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

#include "uhfsynth/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "uhfsynth/random.hpp"

namespace uhfsynth {

namespace {

using nlohmann::json;

struct GenerativeField {
  const char* key;
  double GenerativeConfig::*member;
};

constexpr GenerativeField kGenerativeFields[] = {
    {"a_rot", &GenerativeConfig::a_rot},     {"b_rot", &GenerativeConfig::b_rot},
    {"a_sc", &GenerativeConfig::a_sc},       {"b_sc", &GenerativeConfig::b_sc},
    {"a_sh", &GenerativeConfig::a_sh},       {"b_sh", &GenerativeConfig::b_sh},
    {"a_tr", &GenerativeConfig::a_tr},       {"b_tr", &GenerativeConfig::b_tr},
    {"b_nonlin", &GenerativeConfig::b_nonlin}, {"a_mu", &GenerativeConfig::a_mu},
    {"b_mu", &GenerativeConfig::b_mu},       {"a_sigma", &GenerativeConfig::a_sigma},
    {"b_sigma", &GenerativeConfig::b_sigma}, {"b_B", &GenerativeConfig::b_B},
    {"sigma2_gamma", &GenerativeConfig::sigma2_gamma},
};

// Resolution randomization keys; accepted only as null ("None").
constexpr const char* kDisabledKeys[] = {"r_HR", "b_res", "a_alpha", "b_alpha"};

double number_at(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return j.get<double>();
}

int integer_at(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return j.get<int>();
}

bool apply_generative_key(GenerativeConfig& cfg, const std::string& key, const json& value) {
  for (const auto& f : kGenerativeFields) {
    if (key == f.key) {
      cfg.*(f.member) = number_at(value, key);
      return true;
    }
  }
  for (const char* k : kDisabledKeys) {
    if (key == k) {
      if (!value.is_null()) throw ConfigError("config key '" + key + "' is disabled and may only be null");
      return true;
    }
  }
  if (key == "nonlin_control_points") {
    cfg.nonlin_control_points = integer_at(value, key);
    return true;
  }
  if (key == "bias_control_points") {
    cfg.bias_control_points = integer_at(value, key);
    return true;
  }
  return false;
}

}  // namespace

GenerativeConfig generative_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
  GenerativeConfig cfg;
  for (const auto& [key, value] : j.items())
    if (!apply_generative_key(cfg, key, value)) throw ConfigError("unknown config key '" + key + "'");
  cfg.validate();
  return cfg;
}

json to_json(const GenerativeConfig& cfg) {
  json j = json::object();
  for (const auto& f : kGenerativeFields) j[f.key] = cfg.*(f.member);
  for (const char* k : kDisabledKeys) j[k] = nullptr;
  j["nonlin_control_points"] = cfg.nonlin_control_points;
  j["bias_control_points"] = cfg.bias_control_points;
  return j;
}

void PipelineConfig::validate() const {
  generative.validate();
  for (double s : resample.target_spacing)
    if (!(s > 0)) throw ConfigError("target_spacing must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (folds < 1) throw ConfigError("folds must be at least 1");
  if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("train_fraction must lie in (0, 1)");
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (apply_generative_key(cfg.generative, key, value)) continue;
    if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
        throw ConfigError("config key 'seed' must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      cfg.threads = integer_at(value, key);
    } else if (key == "folds") {
      cfg.folds = integer_at(value, key);
    } else if (key == "train_fraction") {
      cfg.train_fraction = number_at(value, key);
    } else if (key == "target_spacing") {
      if (value.is_number()) {
        const double s = value.get<double>();
        cfg.resample.target_spacing = {s, s, s};
      } else if (value.is_array() && value.size() == 3) {
        for (int a = 0; a < 3; ++a) cfg.resample.target_spacing[a] = number_at(value[a], key);
      } else {
        throw ConfigError("config key 'target_spacing' must be a number or a 3-element array");
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

json PipelineConfig::to_json() const {
  json j = uhfsynth::to_json(generative);
  j["target_spacing"] = {resample.target_spacing[0], resample.target_spacing[1], resample.target_spacing[2]};
  j["seed"] = seed;
  j["threads"] = threads;
  j["folds"] = folds;
  j["train_fraction"] = train_fraction;
  return j;
}

std::string PipelineConfig::hash() const {
  // Thread count does not change any output, so it is not part of the digest.
  json j = to_json();
  j.erase("threads");
  return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> FoldAssignment::validation(int f) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < subjects.size(); ++i)
    if (degenerate || fold[i] == f) out.push_back(subjects[i]);
  return out;
}

std::vector<std::string> FoldAssignment::training(int f) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < subjects.size(); ++i)
    if (degenerate || fold[i] != f) out.push_back(subjects[i]);
  return out;
}

nlohmann::json FoldAssignment::to_json() const {
  json j;
  j["folds"] = folds;
  j["degenerate"] = degenerate;
  json list = json::array();
  for (int f = 0; f < folds; ++f) list.push_back({{"fold", f}, {"train", training(f)}, {"val", validation(f)}});
  j["splits"] = list;
  return j;
}

FoldAssignment split_folds(const std::vector<std::string>& subjects, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("fold count must be at least 1");
  if (subjects.size() < static_cast<std::size_t>(k))
    throw DataError("cannot split " + std::to_string(subjects.size()) + " subjects into " + std::to_string(k) + " folds");
  std::set<std::string> unique(subjects.begin(), subjects.end());
  if (unique.size() != subjects.size()) throw DataError("subject ids must be unique");

  std::vector<std::size_t> order(subjects.size());
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng(seed, hash_tag("fold-split"));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  FoldAssignment out;
  out.folds = k;
  out.subjects = subjects;
  out.fold.assign(subjects.size(), 0);
  out.degenerate = k == 1;
  const std::size_t n = subjects.size();
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) out.fold[order[pos++]] = f;
  }
  return out;
}

nlohmann::json RunManifest::to_json() const {
  json j;
  j["tool"] = "uhfsynth";
  j["version"] = kVersion;
  j["command"] = command;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["config"] = config.to_json();
  j["config_hash"] = config.hash();
  j["seed"] = config.seed;
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest " + path.string());
}

}  // namespace uhfsynth
