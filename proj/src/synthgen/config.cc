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

#include "ulfsynth/synthgen/config.h"

#include <cmath>
#include <fstream>
#include <set>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config field '" + field + "': " + what);
}

void CheckRange(const Range& r, const std::string& field) {
  Require(std::isfinite(r.lo) && std::isfinite(r.hi), field,
          "bounds must be finite");
  Require(r.lo <= r.hi, field, "lo must not exceed hi");
}

void CheckIntRange(const IntRange& r, const std::string& field, int min) {
  Require(r.lo <= r.hi, field, "lo must not exceed hi");
  Require(r.lo >= min, field, "lo must be at least " + std::to_string(min));
}

void CheckProbability(double p, const std::string& field) {
  Require(p >= 0.0 && p <= 1.0, field, "probability must lie in [0, 1]");
}

void CheckAxes(const std::vector<int>& axes, const std::string& field) {
  Require(!axes.empty(), field, "at least one axis is required");
  for (int a : axes) Require(a >= 0 && a <= 2, field, "axes must be 0, 1 or 2");
}

void CheckControlGrid(const Index3& g, const std::string& field) {
  for (int64_t n : g) Require(n >= 2, field, "every dimension must be >= 2");
}

// Walks a JSON object, reporting unknown keys and type errors with the full
// field path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Where() + ": expected an object");
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string Field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& Get(const std::string& key) { return (seen_.insert(key), j_.at(key)); }

  void CheckUnknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError("unknown config field '" + Field(key) + "'");
      }
    }
  }

  void Read(const std::string& key, Range& out);
  void Read(const std::string& key, IntRange& out);
  void Read(const std::string& key, AxisRanges& out);
  void Read(const std::string& key, Index3& out);
  void Read(const std::string& key, std::vector<int>& out);
  void Read(const std::string& key, double& out);
  void Read(const std::string& key, bool& out);

 private:
  std::string Where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double AsNumber(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("config field '" + field + "': expected a number");
  return j.get<double>();
}

int AsInt(const json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    throw ConfigError("config field '" + field + "': expected an integer");
  }
  return j.get<int>();
}

Range ParseRange(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("config field '" + field + "': expected [lo, hi]");
  }
  return {AsNumber(j[0], field), AsNumber(j[1], field)};
}

IntRange ParseIntRange(const json& j, const std::string& field) {
  if (j.is_number_integer()) return {j.get<int>(), j.get<int>()};
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("config field '" + field + "': expected [lo, hi]");
  }
  return {AsInt(j[0], field), AsInt(j[1], field)};
}

AxisRanges ParseAxisRanges(const json& j, const std::string& field) {
  if (j.is_array() && j.size() == 3 && j[0].is_array()) {
    return {ParseRange(j[0], field + "[0]"), ParseRange(j[1], field + "[1]"),
            ParseRange(j[2], field + "[2]")};
  }
  const Range r = ParseRange(j, field);
  return {r, r, r};
}

Index3 ParseIndex3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("config field '" + field + "': expected [nx, ny, nz]");
  }
  return {AsInt(j[0], field), AsInt(j[1], field), AsInt(j[2], field)};
}

std::vector<int> ParseAxes(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("config field '" + field + "': expected a list");
  std::vector<int> out;
  for (const json& v : j) out.push_back(AsInt(v, field));
  return out;
}

bool AsBool(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ConfigError("config field '" + field + "': expected a boolean");
  return j.get<bool>();
}

IntensityPrior ParsePrior(const json& j, const std::string& field) {
  Reader r(j, field);
  IntensityPrior p;
  r.Read("mean", p.mean);
  r.Read("stdev", p.stdev);
  r.CheckUnknown();
  return p;
}

void Reader::Read(const std::string& key, Range& out) {
  if (Has(key)) out = ParseRange(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, IntRange& out) {
  if (Has(key)) out = ParseIntRange(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, AxisRanges& out) {
  if (Has(key)) out = ParseAxisRanges(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, Index3& out) {
  if (Has(key)) out = ParseIndex3(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, std::vector<int>& out) {
  if (Has(key)) out = ParseAxes(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, double& out) {
  if (Has(key)) out = AsNumber(j_.at(key), Field(key));
}
void Reader::Read(const std::string& key, bool& out) {
  if (Has(key)) out = AsBool(j_.at(key), Field(key));
}

json RangeJson(const Range& r) { return json::array({r.lo, r.hi}); }
json RangeJson(const IntRange& r) { return json::array({r.lo, r.hi}); }
json RangeJson(const AxisRanges& r) {
  return json::array({RangeJson(r[0]), RangeJson(r[1]), RangeJson(r[2])});
}
json PriorJson(const IntensityPrior& p) {
  return {{"mean", RangeJson(p.mean)}, {"stdev", RangeJson(p.stdev)}};
}

}  // namespace

void GeneratorConfig::Validate() const {
  auto check_prior = [](const IntensityPrior& p, const std::string& field) {
    CheckRange(p.mean, field + ".mean");
    CheckRange(p.stdev, field + ".stdev");
    Require(p.stdev.lo >= 0, field + ".stdev", "must be non-negative");
  };
  for (const auto& [label, prior] : intensity_priors) {
    Require(label >= 0, "intensity_priors", "labels must be non-negative");
    check_prior(prior, "intensity_priors." + std::to_string(label));
  }
  if (default_prior) check_prior(*default_prior, "default_prior");
  CheckRange(smoothing_sigma_mm, "smoothing_sigma_mm");
  Require(smoothing_sigma_mm.lo >= 0, "smoothing_sigma_mm", "must be non-negative");
  for (int a = 0; a < 3; ++a) {
    const std::string s = "[" + std::to_string(a) + "]";
    CheckRange(affine.rotation_deg[a], "affine.rotation_deg" + s);
    CheckRange(affine.scale[a], "affine.scale" + s);
    Require(affine.scale[a].lo > 0, "affine.scale" + s, "must be positive");
    CheckRange(affine.translation_mm[a], "affine.translation_mm" + s);
    CheckRange(affine.shear[a], "affine.shear" + s);
  }
  CheckControlGrid(nonrigid.control_grid, "nonrigid.control_grid");
  Require(std::isfinite(nonrigid.max_displacement_mm) &&
              nonrigid.max_displacement_mm >= 0,
          "nonrigid.max_displacement_mm", "must be non-negative");
  CheckControlGrid(bias_field.control_grid, "bias_field.control_grid");
  CheckRange(bias_field.log_amplitude, "bias_field.log_amplitude");
  Require(bias_field.log_amplitude.lo >= 0, "bias_field.log_amplitude",
          "must be non-negative");
  CheckRange(gamma, "gamma");
  Require(gamma.lo > 0, "gamma", "must be positive");
  CheckRange(noise_std, "noise_std");
  Require(noise_std.lo >= 0, "noise_std", "must be non-negative");
  CheckRange(resolution.slice_thickness_mm, "resolution.slice_thickness_mm");
  Require(resolution.slice_thickness_mm.lo > 0, "resolution.slice_thickness_mm",
          "must be positive");
  CheckAxes(resolution.axes, "resolution.axes");

  const auto& g = artifacts.ghosting;
  CheckProbability(g.probability, "artifacts.ghosting.probability");
  CheckIntRange(g.num_ghosts, "artifacts.ghosting.num_ghosts", 1);
  CheckRange(g.intensity, "artifacts.ghosting.intensity");
  Require(g.intensity.lo >= 0 && g.intensity.hi <= 1,
          "artifacts.ghosting.intensity", "must lie in [0, 1]");
  CheckAxes(g.axes, "artifacts.ghosting.axes");
  Require(g.restore >= 0 && g.restore <= 1, "artifacts.ghosting.restore",
          "must lie in [0, 1]");
  const auto& s = artifacts.spike;
  CheckProbability(s.probability, "artifacts.spike.probability");
  CheckIntRange(s.num_spikes, "artifacts.spike.num_spikes", 0);
  CheckRange(s.intensity, "artifacts.spike.intensity");
  Require(s.intensity.lo >= 0, "artifacts.spike.intensity", "must be non-negative");
  const auto& m = artifacts.motion;
  CheckProbability(m.probability, "artifacts.motion.probability");
  CheckIntRange(m.num_movements, "artifacts.motion.num_movements", 0);
  CheckRange(m.rotation_deg, "artifacts.motion.rotation_deg");
  CheckRange(m.translation_mm, "artifacts.motion.translation_mm");
  CheckAxes(m.axes, "artifacts.motion.axes");
  Require(seed_policy == kSeedPolicy, "seed_policy",
          std::string("only '") + kSeedPolicy + "' is supported");
}

const IntensityPrior* GeneratorConfig::PriorFor(Label label) const {
  auto it = intensity_priors.find(label);
  if (it != intensity_priors.end()) return &it->second;
  if (label != 0 && default_prior) return &*default_prior;
  return nullptr;
}

GeneratorConfig DisabledRandomization() {
  GeneratorConfig c;
  const Range zero{0, 0};
  c.smoothing_sigma_mm = zero;
  c.affine.rotation_deg = {zero, zero, zero};
  c.affine.scale = {Range{1, 1}, Range{1, 1}, Range{1, 1}};
  c.affine.translation_mm = {zero, zero, zero};
  c.affine.shear = {zero, zero, zero};
  c.nonrigid.max_displacement_mm = 0;
  c.bias_field.log_amplitude = zero;
  c.gamma = {1, 1};
  c.noise_std = zero;
  c.resolution.enabled = false;
  c.artifacts.ghosting.probability = 0;
  c.artifacts.spike.probability = 0;
  c.artifacts.motion.probability = 0;
  return c;
}

GeneratorConfig ConfigFromJson(const json& j) {
  GeneratorConfig c;
  Reader r(j, "");
  if (!r.Has("schema_version")) throw ConfigError("config is missing schema_version");
  if (!r.Get("schema_version").is_number_integer() ||
      r.Get("schema_version").get<int>() != GeneratorConfig::kSchemaVersion) {
    throw ConfigError("unsupported config schema_version " +
                      r.Get("schema_version").dump() + " (expected " +
                      std::to_string(GeneratorConfig::kSchemaVersion) + ")");
  }
  if (r.Has("intensity_priors")) {
    const json& priors = r.Get("intensity_priors");
    if (!priors.is_object()) {
      throw ConfigError("config field 'intensity_priors': expected an object");
    }
    c.intensity_priors.clear();
    for (const auto& [key, value] : priors.items()) {
      Label label;
      try {
        size_t used = 0;
        label = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("config field 'intensity_priors': key '" + key +
                          "' is not a label id");
      }
      c.intensity_priors[label] = ParsePrior(value, "intensity_priors." + key);
    }
  }
  if (r.Has("default_prior")) {
    const json& d = r.Get("default_prior");
    c.default_prior = d.is_null() ? std::nullopt
                                  : std::optional(ParsePrior(d, "default_prior"));
  }
  r.Read("smoothing_sigma_mm", c.smoothing_sigma_mm);
  if (r.Has("affine")) {
    Reader a(r.Get("affine"), "affine");
    a.Read("rotation_deg", c.affine.rotation_deg);
    a.Read("scale", c.affine.scale);
    a.Read("translation_mm", c.affine.translation_mm);
    a.Read("shear", c.affine.shear);
    a.CheckUnknown();
  }
  if (r.Has("nonrigid")) {
    Reader n(r.Get("nonrigid"), "nonrigid");
    n.Read("control_grid", c.nonrigid.control_grid);
    n.Read("max_displacement_mm", c.nonrigid.max_displacement_mm);
    n.CheckUnknown();
  }
  if (r.Has("bias_field")) {
    Reader b(r.Get("bias_field"), "bias_field");
    b.Read("control_grid", c.bias_field.control_grid);
    b.Read("log_amplitude", c.bias_field.log_amplitude);
    b.CheckUnknown();
  }
  r.Read("gamma", c.gamma);
  r.Read("noise_std", c.noise_std);
  if (r.Has("resolution")) {
    Reader res(r.Get("resolution"), "resolution");
    res.Read("enabled", c.resolution.enabled);
    res.Read("slice_thickness_mm", c.resolution.slice_thickness_mm);
    res.Read("axes", c.resolution.axes);
    res.CheckUnknown();
  }
  if (r.Has("artifacts")) {
    Reader art(r.Get("artifacts"), "artifacts");
    if (art.Has("ghosting")) {
      Reader g(art.Get("ghosting"), "artifacts.ghosting");
      auto& cg = c.artifacts.ghosting;
      g.Read("probability", cg.probability);
      g.Read("num_ghosts", cg.num_ghosts);
      g.Read("intensity", cg.intensity);
      g.Read("axes", cg.axes);
      g.Read("restore", cg.restore);
      g.CheckUnknown();
    }
    if (art.Has("spike")) {
      Reader s(art.Get("spike"), "artifacts.spike");
      auto& cs = c.artifacts.spike;
      s.Read("probability", cs.probability);
      s.Read("num_spikes", cs.num_spikes);
      s.Read("intensity", cs.intensity);
      s.CheckUnknown();
    }
    if (art.Has("motion")) {
      Reader m(art.Get("motion"), "artifacts.motion");
      auto& cm = c.artifacts.motion;
      m.Read("probability", cm.probability);
      m.Read("num_movements", cm.num_movements);
      m.Read("rotation_deg", cm.rotation_deg);
      m.Read("translation_mm", cm.translation_mm);
      m.Read("axes", cm.axes);
      m.CheckUnknown();
    }
    art.CheckUnknown();
  }
  if (r.Has("seed_policy")) {
    if (!r.Get("seed_policy").is_string()) {
      throw ConfigError("config field 'seed_policy': expected a string");
    }
    c.seed_policy = r.Get("seed_policy").get<std::string>();
  }
  r.CheckUnknown();
  c.Validate();
  return c;
}

json ConfigToJson(const GeneratorConfig& c) {
  json priors = json::object();
  for (const auto& [label, prior] : c.intensity_priors) {
    priors[std::to_string(label)] = PriorJson(prior);
  }
  const auto& g = c.artifacts.ghosting;
  const auto& s = c.artifacts.spike;
  const auto& m = c.artifacts.motion;
  return {
      {"schema_version", GeneratorConfig::kSchemaVersion},
      {"intensity_priors", priors},
      {"default_prior", c.default_prior ? PriorJson(*c.default_prior) : json()},
      {"smoothing_sigma_mm", RangeJson(c.smoothing_sigma_mm)},
      {"affine",
       {{"rotation_deg", RangeJson(c.affine.rotation_deg)},
        {"scale", RangeJson(c.affine.scale)},
        {"translation_mm", RangeJson(c.affine.translation_mm)},
        {"shear", RangeJson(c.affine.shear)}}},
      {"nonrigid",
       {{"control_grid", c.nonrigid.control_grid},
        {"max_displacement_mm", c.nonrigid.max_displacement_mm}}},
      {"bias_field",
       {{"control_grid", c.bias_field.control_grid},
        {"log_amplitude", RangeJson(c.bias_field.log_amplitude)}}},
      {"gamma", RangeJson(c.gamma)},
      {"noise_std", RangeJson(c.noise_std)},
      {"resolution",
       {{"enabled", c.resolution.enabled},
        {"slice_thickness_mm", RangeJson(c.resolution.slice_thickness_mm)},
        {"axes", c.resolution.axes}}},
      {"artifacts",
       {{"ghosting",
         {{"probability", g.probability},
          {"num_ghosts", RangeJson(g.num_ghosts)},
          {"intensity", RangeJson(g.intensity)},
          {"axes", g.axes},
          {"restore", g.restore}}},
        {"spike",
         {{"probability", s.probability},
          {"num_spikes", RangeJson(s.num_spikes)},
          {"intensity", RangeJson(s.intensity)}}},
        {"motion",
         {{"probability", m.probability},
          {"num_movements", RangeJson(m.num_movements)},
          {"rotation_deg", RangeJson(m.rotation_deg)},
          {"translation_mm", RangeJson(m.translation_mm)},
          {"axes", m.axes}}}}},
      {"seed_policy", c.seed_policy},
  };
}

GeneratorConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open generator config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("generator config '" + path + "': " + e.what());
  }
  try {
    return ConfigFromJson(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ulfsynth
