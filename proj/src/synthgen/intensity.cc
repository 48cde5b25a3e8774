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

#include "ulfsynth/synthgen/intensity.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulfsynth/synthgen/transform.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/filter.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

double Uniform(Rng& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

std::string ClassName(const LabelMap& labels, Label label) {
  if (label == 0) return "background (0)";
  auto it = labels.vocabulary().find(label);
  const std::string name = it == labels.vocabulary().end() ? "" : it->second;
  return name.empty() ? std::to_string(label)
                      : "'" + name + "' (" + std::to_string(label) + ")";
}

Volume NormalizeValues(const Grid& grid, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<float> out(values.size());
  const double span = hi - lo;
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = span > 1e-12 ? (values[i] - lo) / span : values[i];
    out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return Volume(grid, std::move(out));
}

}  // namespace

Volume NormalizeUnit(const Volume& volume) {
  return NormalizeValues(volume.grid(),
                         std::vector<double>(volume.data().begin(), volume.data().end()));
}

IntensityParams SampleIntensityParams(const LabelMap& labels, Rng& rng,
                                      const GeneratorConfig& config) {
  std::set<Label> present = labels.PresentLabels();
  if (labels.Count(0) > 0) present.insert(0);
  std::set<Label> candidates{0};
  for (const auto& [label, name] : labels.vocabulary()) candidates.insert(label);
  candidates.insert(present.begin(), present.end());

  IntensityParams p;
  for (Label label : candidates) {
    const IntensityPrior* prior = config.PriorFor(label);
    if (prior == nullptr) {
      if (present.contains(label)) {
        throw ConfigError("no intensity prior for class " + ClassName(labels, label));
      }
      continue;
    }
    ClassIntensity c;
    c.mean = Uniform(rng, prior->mean);
    c.stdev = Uniform(rng, prior->stdev);
    p.classes[label] = c;
  }
  p.noise_seed = rng();
  p.smoothing_sigma_mm = Uniform(rng, config.smoothing_sigma_mm);
  return p;
}

Volume RenderIntensity(const LabelMap& labels, const IntensityParams& params) {
  Rng rng(params.noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<float> data(labels.size());
  for (int64_t o = 0; o < labels.size(); ++o) {
    auto it = params.classes.find(labels[o]);
    if (it == params.classes.end()) {
      throw ConfigError("no intensity parameters for label " +
                        std::to_string(labels[o]));
    }
    const double z = normal(rng);
    data[o] = static_cast<float>(it->second.mean + it->second.stdev * z);
  }
  Volume volume(labels.grid(), std::move(data));
  if (params.smoothing_sigma_mm > 0) {
    const double s = params.smoothing_sigma_mm;
    volume = GaussianSmooth(volume, {s, s, s});
  }
  return volume;
}

Volume SynthIntensity(const LabelMap& labels, Rng& rng,
                      const GeneratorConfig& config) {
  return NormalizeUnit(RenderIntensity(labels, SampleIntensityParams(labels, rng, config)));
}

BiasParams SampleBiasParams(Rng& rng, const GeneratorConfig& config) {
  BiasParams p;
  p.control_grid = config.bias_field.control_grid;
  const double sigma = Uniform(rng, config.bias_field.log_amplitude);
  std::normal_distribution<double> normal(0.0, 1.0);
  p.log_values.resize(p.control_grid[0] * p.control_grid[1] * p.control_grid[2]);
  for (double& v : p.log_values) v = sigma * normal(rng);
  return p;
}

std::vector<double> BiasMultiplier(const BiasParams& params, const Grid& grid) {
  std::vector<double> field =
      UpsampleControlGrid(params.log_values, params.control_grid, 1, grid.dims());
  for (double& v : field) v = std::exp(v);
  return field;
}

Volume ApplyBiasField(const Volume& volume, const BiasParams& params) {
  const std::vector<double> m = BiasMultiplier(params, volume.grid());
  std::vector<double> values(volume.size());
  for (int64_t o = 0; o < volume.size(); ++o) values[o] = volume[o] * m[o];
  return NormalizeValues(volume.grid(), values);
}

Volume ApplyBiasField(const Volume& volume, Rng& rng,
                      const GeneratorConfig& config) {
  return ApplyBiasField(volume, SampleBiasParams(rng, config));
}

Volume ApplyGamma(const Volume& volume, double gamma) {
  std::vector<float> out(volume.size());
  for (int64_t o = 0; o < volume.size(); ++o) {
    const double v = std::clamp(static_cast<double>(volume[o]), 0.0, 1.0);
    out[o] = static_cast<float>(std::pow(v, gamma));
  }
  return Volume(volume.grid(), std::move(out));
}

NoiseParams SampleNoiseParams(Rng& rng, const GeneratorConfig& config) {
  NoiseParams p;
  p.stdev = Uniform(rng, config.noise_std);
  p.noise_seed = rng();
  return p;
}

Volume ApplyNoise(const Volume& volume, const NoiseParams& params) {
  if (params.stdev == 0.0) return NormalizeUnit(volume);
  Rng rng(params.noise_seed);
  std::normal_distribution<double> normal(0.0, params.stdev);
  std::vector<double> values(volume.size());
  for (int64_t o = 0; o < volume.size(); ++o) values[o] = volume[o] + normal(rng);
  return NormalizeValues(volume.grid(), values);
}

json ToJson(const IntensityParams& p) {
  json classes = json::object();
  for (const auto& [label, c] : p.classes) {
    classes[std::to_string(label)] = {{"mean", c.mean}, {"stdev", c.stdev}};
  }
  return {{"classes", classes},
          {"noise_seed", p.noise_seed},
          {"smoothing_sigma_mm", p.smoothing_sigma_mm}};
}

json ToJson(const BiasParams& p) {
  return {{"control_grid", p.control_grid}, {"log_values", p.log_values}};
}

json ToJson(const NoiseParams& p) {
  return {{"stdev", p.stdev}, {"noise_seed", p.noise_seed}};
}

IntensityParams IntensityParamsFromJson(const json& j) {
  IntensityParams p;
  for (const auto& [key, value] : j.at("classes").items()) {
    p.classes[std::stoi(key)] = {value.at("mean").get<double>(),
                                 value.at("stdev").get<double>()};
  }
  p.noise_seed = j.at("noise_seed").get<uint64_t>();
  p.smoothing_sigma_mm = j.at("smoothing_sigma_mm").get<double>();
  return p;
}

BiasParams BiasParamsFromJson(const json& j) {
  return {j.at("control_grid").get<Index3>(),
          j.at("log_values").get<std::vector<double>>()};
}

NoiseParams NoiseParamsFromJson(const json& j) {
  return {j.at("stdev").get<double>(), j.at("noise_seed").get<uint64_t>()};
}

}  // namespace ulfsynth
