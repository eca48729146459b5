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
#include <string_view>

namespace uhfsynth {

enum class Hemisphere { left, right, none };

struct LabelEntry {
  std::uint16_t index;
  std::string_view name;
  Hemisphere hemisphere;
};

inline constexpr std::uint16_t kWmHypointensities = 35;
inline constexpr std::uint16_t kExtraCerebral = 36;

/// Whole-brain label set (FreeSurfer naming) with the synthetic
/// extra-cerebral label appended.
inline constexpr std::array<LabelEntry, 36> kLabelTable{{
    {1, "Cerebral white matter", Hemisphere::left},
    {2, "Cerebral cortex", Hemisphere::left},
    {3, "Lateral Ventricle", Hemisphere::left},
    {4, "Inferior Lateral Ventricle", Hemisphere::left},
    {5, "Cerebellar White Matter", Hemisphere::left},
    {6, "Cerebellar Cortex", Hemisphere::left},
    {7, "Thalamus", Hemisphere::left},
    {8, "Caudate", Hemisphere::left},
    {9, "Putamen", Hemisphere::left},
    {10, "Pallidum", Hemisphere::left},
    {11, "3rd-Ventricle", Hemisphere::none},
    {12, "4th-Ventricle", Hemisphere::none},
    {13, "Brain Stem", Hemisphere::none},
    {14, "Hippocampus", Hemisphere::left},
    {15, "Amygdala", Hemisphere::left},
    {16, "CSF", Hemisphere::none},
    {17, "Accumbens", Hemisphere::left},
    {18, "Ventral DC", Hemisphere::left},
    {19, "Choroid Plexus", Hemisphere::left},
    {20, "Cerebral white matter", Hemisphere::right},
    {21, "Cerebral cortex", Hemisphere::right},
    {22, "Lateral Ventricle", Hemisphere::right},
    {23, "Inferior Lateral Ventricle", Hemisphere::right},
    {24, "Cerebellar White Matter", Hemisphere::right},
    {25, "Cerebellar Cortex", Hemisphere::right},
    {26, "Thalamus", Hemisphere::right},
    {27, "Caudate", Hemisphere::right},
    {28, "Putamen", Hemisphere::right},
    {29, "Pallidum", Hemisphere::right},
    {30, "Hippocampus", Hemisphere::right},
    {31, "Amygdala", Hemisphere::right},
    {32, "Accumbens", Hemisphere::right},
    {33, "Ventral DC", Hemisphere::right},
    {34, "Choroid Plexus", Hemisphere::right},
    {35, "WM-hypointensities", Hemisphere::none},
    {36, "Extra-Cerebral", Hemisphere::none},
}};

}  // namespace uhfsynth
