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

#ifndef ULFSYNTH_SYNTHGEN_GENERATOR_H_
#define ULFSYNTH_SYNTHGEN_GENERATOR_H_

#include <cstdint>
#include <optional>

#include "json.hpp"
#include "ulfsynth/synthgen/acquisition.h"
#include "ulfsynth/synthgen/artifacts.h"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/intensity.h"
#include "ulfsynth/synthgen/transform.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

// Every sampled value of one generation. Replaying a plan needs no RNG
// beyond the noise seeds stored in it.
struct GenerationPlan {
  uint64_t seed = 0;
  TransformParams transform;
  IntensityParams intensity;
  BiasParams bias;
  double gamma = 1.0;
  NoiseParams noise;
  std::optional<AcquisitionParams> acquisition;
  std::optional<GhostingParams> ghosting;
  std::optional<SpikeParams> spike;
  std::optional<MotionParams> motion;
};

struct SynthSample {
  Volume image;
  LabelMap labels;
  uint64_t seed;
  nlohmann::json provenance;
};

GenerationPlan PlanGeneration(const LabelMap& labels, uint64_t seed,
                              const GeneratorConfig& config);
SynthSample ExecutePlan(const LabelMap& labels, const GenerationPlan& plan,
                        const GeneratorConfig& config);

// PlanGeneration followed by ExecutePlan. Pure and reentrant.
SynthSample Generate(const LabelMap& labels, uint64_t seed,
                     const GeneratorConfig& config);

// Re-runs a sample from its provenance record alone.
SynthSample Replay(const LabelMap& labels, const nlohmann::json& provenance);

nlohmann::json ProvenanceJson(const GenerationPlan& plan,
                              const GeneratorConfig& config);
GenerationPlan PlanFromProvenance(const nlohmann::json& provenance);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_GENERATOR_H_
