// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ULFSYNTH_SYNTHGEN_CONFIG_H_
#define ULFSYNTH_SYNTHGEN_CONFIG_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ulfsynth/volgrid/grid.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

// Closed interval [lo, hi]; a degenerate interval fixes the value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool operator==(const IntRange&) const = default;
};

using AxisRanges = std::array<Range, 3>;

struct IntensityPrior {
  Range mean;
  Range stdev;
  bool operator==(const IntensityPrior&) const = default;
};

struct AffineRanges {
  AxisRanges rotation_deg{{{-15, 15}, {-15, 15}, {-15, 15}}};
  AxisRanges scale{{{0.85, 1.15}, {0.85, 1.15}, {0.85, 1.15}}};
  AxisRanges translation_mm{{{-10, 10}, {-10, 10}, {-10, 10}}};
  // Off-diagonal shear coefficients xy, xz, yz.
  AxisRanges shear{{{-0.01, 0.01}, {-0.01, 0.01}, {-0.01, 0.01}}};
  bool operator==(const AffineRanges&) const = default;
};

struct NonrigidConfig {
  Index3 control_grid{5, 5, 5};
  double max_displacement_mm = 4.0;
  bool operator==(const NonrigidConfig&) const = default;
};

struct BiasFieldConfig {
  Index3 control_grid{4, 4, 4};
  // Standard deviation of the coarse log-field, drawn per sample.
  Range log_amplitude{0.0, 0.5};
  bool operator==(const BiasFieldConfig&) const = default;
};

struct ResolutionConfig {
  bool enabled = true;
  Range slice_thickness_mm{1.0, 5.0};
  std::vector<int> axes{0, 1, 2};
  bool operator==(const ResolutionConfig&) const = default;
};

struct GhostingConfig {
  double probability = 0.3;
  IntRange num_ghosts{2, 5};
  Range intensity{0.2, 1.0};
  std::vector<int> axes{0, 1, 2};
  // Fraction of the axis extent around k = 0 left untouched.
  double restore = 0.06;
  bool operator==(const GhostingConfig&) const = default;
};

struct SpikeConfig {
  double probability = 0.3;
  IntRange num_spikes{1, 3};
  Range intensity{0.05, 0.3};
  bool operator==(const SpikeConfig&) const = default;
};

struct MotionConfig {
  double probability = 0.3;
  IntRange num_movements{1, 3};
  Range rotation_deg{-10, 10};
  Range translation_mm{-10, 10};
  std::vector<int> axes{0, 1, 2};
  bool operator==(const MotionConfig&) const = default;
};

struct ArtifactConfig {
  GhostingConfig ghosting;
  SpikeConfig spike;
  MotionConfig motion;
  bool operator==(const ArtifactConfig&) const = default;
};

struct GeneratorConfig {
  static constexpr int kSchemaVersion = 1;
  static constexpr const char* kSeedPolicy = "fnv1a-splitmix64-v1";

  // Per-label priors. Label 0 is the background.
  std::map<Label, IntensityPrior> intensity_priors{
      {0, {{0.0, 0.3}, {0.01, 0.1}}}};
  // Used for labels without an entry above; unset means such labels are a
  // configuration error.
  std::optional<IntensityPrior> default_prior =
      IntensityPrior{{0.1, 0.9}, {0.01, 0.1}};
  Range smoothing_sigma_mm{0.0, 1.0};
  AffineRanges affine;
  NonrigidConfig nonrigid;
  BiasFieldConfig bias_field;
  Range gamma{0.7, 1.4};
  Range noise_std{0.0, 0.05};
  ResolutionConfig resolution;
  ArtifactConfig artifacts;
  std::string seed_policy = kSeedPolicy;

  // Throws ConfigError naming the first offending field.
  void Validate() const;

  // Prior for `label`, or nullptr when none applies.
  const IntensityPrior* PriorFor(Label label) const;

  bool operator==(const GeneratorConfig&) const = default;
};

// Every randomization off: identity transform, fixed priors are left as
// configured, no bias, gamma 1, no noise, no acquisition, no artifacts.
GeneratorConfig DisabledRandomization();

// Keys missing from `json` keep their defaults; unknown keys and a wrong or
// missing schema_version are ConfigErrors.
GeneratorConfig ConfigFromJson(const nlohmann::json& json);
nlohmann::json ConfigToJson(const GeneratorConfig& config);
GeneratorConfig LoadConfig(const std::string& path);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_CONFIG_H_
