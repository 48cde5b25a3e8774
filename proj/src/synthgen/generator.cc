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

#include "ulfsynth/synthgen/generator.h"

#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/resample.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

constexpr int kProvenanceVersion = 1;

bool Draw(Rng& rng, double probability) {
  if (probability <= 0.0) return false;
  if (probability >= 1.0) return true;
  return std::bernoulli_distribution(probability)(rng);
}

const json* FindStage(const json& stages, const std::string& name) {
  for (const json& s : stages) {
    if (s.at("name") == name) return &s.at("params");
  }
  return nullptr;
}

}  // namespace

GenerationPlan PlanGeneration(const LabelMap& labels, uint64_t seed,
                              const GeneratorConfig& config) {
  config.Validate();
  GenerationPlan plan;
  plan.seed = seed;
  {
    Rng rng = StageRng(seed, "transform");
    plan.transform = SampleTransformParams(rng, config);
  }
  {
    Rng rng = StageRng(seed, "intensity");
    plan.intensity = SampleIntensityParams(labels, rng, config);
  }
  {
    Rng rng = StageRng(seed, "bias");
    plan.bias = SampleBiasParams(rng, config);
  }
  {
    Rng rng = StageRng(seed, "gamma");
    const Range& g = config.gamma;
    plan.gamma = g.lo == g.hi ? g.lo : std::uniform_real_distribution<double>(g.lo, g.hi)(rng);
  }
  {
    Rng rng = StageRng(seed, "noise");
    plan.noise = SampleNoiseParams(rng, config);
  }
  if (config.resolution.enabled) {
    Rng rng = StageRng(seed, "acquisition");
    plan.acquisition = SampleAcquisitionParams(rng, config);
  }
  const Index3& dims = labels.grid().dims();
  const ArtifactConfig& a = config.artifacts;
  if (Rng rng = StageRng(seed, "ghosting"); Draw(rng, a.ghosting.probability)) {
    plan.ghosting = SampleGhostingParams(rng, a.ghosting);
  }
  if (Rng rng = StageRng(seed, "spike"); Draw(rng, a.spike.probability)) {
    plan.spike = SampleSpikeParams(rng, a.spike, dims);
  }
  if (Rng rng = StageRng(seed, "motion"); Draw(rng, a.motion.probability)) {
    plan.motion = SampleMotionParams(rng, a.motion, dims);
  }
  return plan;
}

SynthSample ExecutePlan(const LabelMap& labels, const GenerationPlan& plan,
                        const GeneratorConfig& config) {
  const DisplacementField field = BuildTransform(plan.transform, labels.grid()).ToField();
  LabelMap warped = Warp(labels, field, Interpolation::kNearest);
  Volume image = NormalizeUnit(RenderIntensity(warped, plan.intensity));
  image = ApplyBiasField(image, plan.bias);
  image = ApplyGamma(image, plan.gamma);
  image = ApplyNoise(image, plan.noise);
  if (plan.acquisition) image = SimulateAcquisition(image, *plan.acquisition).image;
  if (plan.ghosting) image = ApplyGhosting(image, *plan.ghosting);
  if (plan.spike) image = ApplySpikes(image, *plan.spike);
  if (plan.motion) image = ApplyMotion(image, *plan.motion);
  image = NormalizeUnit(image);
  return {std::move(image), std::move(warped), plan.seed, ProvenanceJson(plan, config)};
}

SynthSample Generate(const LabelMap& labels, uint64_t seed,
                     const GeneratorConfig& config) {
  return ExecutePlan(labels, PlanGeneration(labels, seed, config), config);
}

json ProvenanceJson(const GenerationPlan& plan, const GeneratorConfig& config) {
  json stages = json::array();
  json skipped = json::array();
  auto stage = [&](const char* name, json params) {
    stages.push_back({{"name", name}, {"params", std::move(params)}});
  };
  auto skip = [&](const char* name, const char* reason) {
    skipped.push_back({{"name", name}, {"reason", reason}});
  };
  stage("transform", ToJson(plan.transform));
  stage("intensity", ToJson(plan.intensity));
  stage("bias_field", ToJson(plan.bias));
  stage("gamma", {{"gamma", plan.gamma}});
  stage("noise", ToJson(plan.noise));
  if (plan.acquisition) {
    stage("acquisition", ToJson(*plan.acquisition));
  } else {
    skip("acquisition", "disabled");
  }
  if (plan.ghosting) stage("ghosting", ToJson(*plan.ghosting));
  else skip("ghosting", "not drawn");
  if (plan.spike) stage("spike", ToJson(*plan.spike));
  else skip("spike", "not drawn");
  if (plan.motion) stage("motion", ToJson(*plan.motion));
  else skip("motion", "not drawn");
  stage("normalize", json::object());
  return {{"provenance_version", kProvenanceVersion},
          {"seed", plan.seed},
          {"seed_policy", config.seed_policy},
          {"config", ConfigToJson(config)},
          {"stages", stages},
          {"skipped", skipped}};
}

GenerationPlan PlanFromProvenance(const json& provenance) {
  try {
    if (provenance.at("provenance_version") != kProvenanceVersion) {
      throw ConfigError("unsupported provenance_version " +
                        provenance.at("provenance_version").dump());
    }
    const json& stages = provenance.at("stages");
    auto require = [&](const std::string& name) -> const json& {
      const json* s = FindStage(stages, name);
      if (s == nullptr) throw ConfigError("provenance lacks the '" + name + "' stage");
      return *s;
    };
    GenerationPlan plan;
    plan.seed = provenance.at("seed").get<uint64_t>();
    plan.transform = TransformParamsFromJson(require("transform"));
    plan.intensity = IntensityParamsFromJson(require("intensity"));
    plan.bias = BiasParamsFromJson(require("bias_field"));
    plan.gamma = require("gamma").at("gamma").get<double>();
    plan.noise = NoiseParamsFromJson(require("noise"));
    if (const json* s = FindStage(stages, "acquisition")) {
      plan.acquisition = AcquisitionParamsFromJson(*s);
    }
    if (const json* s = FindStage(stages, "ghosting")) {
      plan.ghosting = GhostingParamsFromJson(*s);
    }
    if (const json* s = FindStage(stages, "spike")) plan.spike = SpikeParamsFromJson(*s);
    if (const json* s = FindStage(stages, "motion")) plan.motion = MotionParamsFromJson(*s);
    return plan;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed provenance: ") + e.what());
  }
}

SynthSample Replay(const LabelMap& labels, const json& provenance) {
  if (!provenance.contains("config")) throw ConfigError("provenance lacks 'config'");
  const GeneratorConfig config = ConfigFromJson(provenance.at("config"));
  return ExecutePlan(labels, PlanFromProvenance(provenance), config);
}

}  // namespace ulfsynth
