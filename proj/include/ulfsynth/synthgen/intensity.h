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

#ifndef ULFSYNTH_SYNTHGEN_INTENSITY_H_
#define ULFSYNTH_SYNTHGEN_INTENSITY_H_

#include <cstdint>
#include <map>
#include <vector>

#include "json.hpp"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

struct ClassIntensity {
  double mean = 0.0;
  double stdev = 0.0;
};

struct IntensityParams {
  std::map<Label, ClassIntensity> classes;
  uint64_t noise_seed = 0;
  double smoothing_sigma_mm = 0.0;
};

struct BiasParams {
  Index3 control_grid{2, 2, 2};
  std::vector<double> log_values;
};

struct NoiseParams {
  double stdev = 0.0;
  uint64_t noise_seed = 0;
};

// Min-max rescale to [0, 1]. A constant volume is clamped to [0, 1] instead.
Volume NormalizeUnit(const Volume& volume);

// Draws (mean, stdev) for the background and every vocabulary label that has
// a prior. Throws ConfigError naming a label present in `labels` that has no
// prior.
IntensityParams SampleIntensityParams(const LabelMap& labels, Rng& rng,
                                      const GeneratorConfig& config);

// Gaussian fill and smoothing, before normalization.
Volume RenderIntensity(const LabelMap& labels, const IntensityParams& params);
Volume SynthIntensity(const LabelMap& labels, Rng& rng,
                      const GeneratorConfig& config);

BiasParams SampleBiasParams(Rng& rng, const GeneratorConfig& config);
// exp of the upsampled log-field on `grid`.
std::vector<double> BiasMultiplier(const BiasParams& params, const Grid& grid);
Volume ApplyBiasField(const Volume& volume, const BiasParams& params);
Volume ApplyBiasField(const Volume& volume, Rng& rng,
                      const GeneratorConfig& config);

// v -> v^gamma on a [0, 1] volume.
Volume ApplyGamma(const Volume& volume, double gamma);

NoiseParams SampleNoiseParams(Rng& rng, const GeneratorConfig& config);
// Additive Gaussian noise followed by NormalizeUnit.
Volume ApplyNoise(const Volume& volume, const NoiseParams& params);

nlohmann::json ToJson(const IntensityParams& params);
nlohmann::json ToJson(const BiasParams& params);
nlohmann::json ToJson(const NoiseParams& params);
IntensityParams IntensityParamsFromJson(const nlohmann::json& json);
BiasParams BiasParamsFromJson(const nlohmann::json& json);
NoiseParams NoiseParamsFromJson(const nlohmann::json& json);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_INTENSITY_H_
