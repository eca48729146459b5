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

#include <filesystem>
#include <variant>
#include <vector>

#include "uhfsynth/volume.hpp"

namespace uhfsynth::nifti {

/// Reads a 3D NIfTI-1 file (.nii or .nii.gz) as floating point. Geometry comes
/// from the sform when set, else the qform, else pixdim alone. scl_slope and
/// scl_inter are applied.
ScalarVolume read_scalar(const std::filesystem::path& path);

/// Reads a 3D NIfTI-1 file as a label map. Values must be integers in
/// 0..kMaxLabel.
LabelVolume read_labels(const std::filesystem::path& path);

/// Integer-typed files whose values fit the label range load as labels,
/// everything else as scalars.
std::variant<ScalarVolume, LabelVolume> read_volume(const std::filesystem::path& path);

/// Reads a 4D file as one volume per entry of the fourth dimension.
std::vector<ScalarVolume> read_frames(const std::filesystem::path& path);

/// Writes float32 data. Both sform and qform are populated from the affine.
void write_volume(const ScalarVolume& vol, const std::filesystem::path& path);
/// Writes uint16 data.
void write_volume(const LabelVolume& vol, const std::filesystem::path& path);
/// Writes equally shaped volumes as one 4D float32 file.
void write_frames(const std::vector<ScalarVolume>& frames, const std::filesystem::path& path);

/// True for names ending in .nii or .nii.gz.
bool is_nifti_path(const std::filesystem::path& path);
/// File name with the .nii / .nii.gz suffix removed.
std::string case_name(const std::filesystem::path& path);

}  // namespace uhfsynth::nifti
