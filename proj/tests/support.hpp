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

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "uhfsynth/random.hpp"
#include "uhfsynth/volume.hpp"

namespace testing {

using namespace uhfsynth;

inline LabelVolume label_grid(Dims d, double spacing = 1.0, std::string_view code = "RAS") {
  return LabelVolume(d, make_affine({spacing, spacing, spacing}, OrientationCode(code)));
}

inline MaskVolume mask_grid(Dims d, double spacing = 1.0) {
  return MaskVolume(d, make_affine({spacing, spacing, spacing}, OrientationCode("RAS")));
}

inline ScalarVolume scalar_grid(Dims d, double spacing = 1.0, float fill = 0.0f) {
  return ScalarVolume(d, make_affine({spacing, spacing, spacing}, OrientationCode("RAS")), fill);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("uhfsynth_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
