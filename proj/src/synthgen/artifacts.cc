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

#include "ulfsynth/synthgen/artifacts.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "ulfsynth/synthgen/kspace.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/resample.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

double Uniform(Rng& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

int UniformInt(Rng& rng, const IntRange& r) {
  return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

int PickAxis(Rng& rng, const std::vector<int>& axes) {
  return axes[std::uniform_int_distribution<size_t>(0, axes.size() - 1)(rng)];
}

void CheckAxis(int axis) {
  if (axis < 0 || axis > 2) throw ContractError("axis must be 0, 1 or 2");
}

int64_t AxisIndex(const Grid& grid, int64_t offset, int axis) {
  return grid.IndexOf(offset)[axis];
}

std::array<double, 3> ReadTriple(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

GhostingParams SampleGhostingParams(Rng& rng, const GhostingConfig& config) {
  GhostingParams p;
  p.axis = PickAxis(rng, config.axes);
  p.num_ghosts = UniformInt(rng, config.num_ghosts);
  p.intensity = Uniform(rng, config.intensity);
  p.restore = config.restore;
  return p;
}

Volume ApplyGhosting(const Volume& volume, const GhostingParams& params) {
  CheckAxis(params.axis);
  if (params.num_ghosts < 1) throw ContractError("num_ghosts must be >= 1");
  const Grid& grid = volume.grid();
  const int64_t n = grid.dims()[params.axis];
  const double protect = params.restore * static_cast<double>(n) / 2.0;
  std::vector<Complex> k = ForwardFft(volume);
  const double factor = 1.0 - params.intensity;
  for (int64_t o = 0; o < static_cast<int64_t>(k.size()); ++o) {
    const int64_t f = SignedFrequency(AxisIndex(grid, o, params.axis), n);
    if (f % params.num_ghosts == 0 && std::abs(static_cast<double>(f)) >= protect) {
      k[o] *= factor;
    }
  }
  return RealPartClamped(InverseFft(std::move(k), grid.dims()), grid);
}

SpikeParams SampleSpikeParams(Rng& rng, const SpikeConfig& config,
                              const Index3& dims) {
  SpikeParams p;
  const int count = UniformInt(rng, config.num_spikes);
  const int64_t total = dims[0] * dims[1] * dims[2];
  if (total < 2) return p;
  std::uniform_int_distribution<int64_t> bin(1, total - 1);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  for (int s = 0; s < count; ++s) {
    const int64_t o = bin(rng);
    Spike spike;
    spike.bin = {o % dims[0], (o / dims[0]) % dims[1], o / (dims[0] * dims[1])};
    spike.intensity = Uniform(rng, config.intensity);
    spike.phase = phase(rng);
    p.spikes.push_back(spike);
  }
  return p;
}

Volume ApplySpikes(const Volume& volume, const SpikeParams& params) {
  const Grid& grid = volume.grid();
  std::vector<Complex> k = ForwardFft(volume);
  double peak = 0.0;
  for (const Complex& c : k) peak = std::max(peak, std::abs(c));
  for (const Spike& s : params.spikes) {
    if (!grid.Contains(s.bin[0], s.bin[1], s.bin[2])) {
      throw ContractError("spike bin outside the k-space grid");
    }
    if (s.bin == Index3{0, 0, 0}) throw ContractError("spike bin must not be DC");
    k[grid.Offset(s.bin[0], s.bin[1], s.bin[2])] +=
        std::polar(s.intensity * peak, s.phase);
  }
  return RealPartClamped(InverseFft(std::move(k), grid.dims()), grid);
}

MotionParams SampleMotionParams(Rng& rng, const MotionConfig& config,
                                const Index3& dims) {
  MotionParams p;
  p.axis = PickAxis(rng, config.axes);
  const int64_t n = dims[p.axis];
  const int count = static_cast<int>(
      std::min<int64_t>(UniformInt(rng, config.num_movements), n - 1));
  for (int m = 0; m < count; ++m) {
    RigidParams r;
    for (double& a : r.rotation_deg) a = Uniform(rng, config.rotation_deg);
    for (double& t : r.translation_mm) t = Uniform(rng, config.translation_mm);
    p.movements.push_back(r);
  }
  // Distinct cut positions drawn from 1..n-1.
  std::vector<int64_t> positions(n - 1);
  for (int64_t i = 0; i < n - 1; ++i) positions[i] = i + 1;
  for (int m = 0; m < count; ++m) {
    const int64_t j = std::uniform_int_distribution<int64_t>(m, n - 2)(rng);
    std::swap(positions[m], positions[j]);
    p.cuts.push_back(positions[m]);
  }
  std::sort(p.cuts.begin(), p.cuts.end());
  return p;
}

Volume ApplyMotion(const Volume& volume, const MotionParams& params) {
  CheckAxis(params.axis);
  if (params.cuts.size() != params.movements.size()) {
    throw ContractError("motion needs one cut per movement");
  }
  const Grid& grid = volume.grid();
  const int64_t n = grid.dims()[params.axis];
  for (size_t i = 0; i < params.cuts.size(); ++i) {
    if (params.cuts[i] < 1 || params.cuts[i] > n - 1 ||
        (i > 0 && params.cuts[i] <= params.cuts[i - 1])) {
      throw ContractError("motion cuts must be increasing and inside (0, n)");
    }
  }
  std::vector<std::vector<Complex>> spectra;
  spectra.push_back(ForwardFft(volume));
  for (const RigidParams& r : params.movements) {
    AffineParams a;
    a.rotation_deg = r.rotation_deg;
    a.translation_mm = r.translation_mm;
    const SpatialTransform t{ForwardAffine(a, grid.Center()).inverse(),
                             DisplacementField(grid)};
    spectra.push_back(ForwardFft(Warp(volume, t.ToField(), Interpolation::kLinear)));
  }
  // Block index of a centred bin position; the block containing k = 0 reads
  // the unmoved spectrum.
  auto block_of = [&](int64_t centred) {
    return static_cast<int64_t>(
        std::upper_bound(params.cuts.begin(), params.cuts.end(), centred) -
        params.cuts.begin());
  };
  const int64_t centre_block = block_of(n / 2);
  std::vector<Complex> k(spectra[0].size());
  for (int64_t o = 0; o < static_cast<int64_t>(k.size()); ++o) {
    const int64_t centred = (AxisIndex(grid, o, params.axis) + n / 2) % n;
    const int64_t b = block_of(centred);
    const int64_t source = b == centre_block ? 0 : (b < centre_block ? b + 1 : b);
    k[o] = spectra[source][o];
  }
  return RealPartClamped(InverseFft(std::move(k), grid.dims()), grid);
}

json ToJson(const GhostingParams& p) {
  return {{"axis", p.axis},
          {"num_ghosts", p.num_ghosts},
          {"intensity", p.intensity},
          {"restore", p.restore}};
}

json ToJson(const SpikeParams& p) {
  json spikes = json::array();
  for (const Spike& s : p.spikes) {
    spikes.push_back({{"bin", s.bin}, {"intensity", s.intensity}, {"phase", s.phase}});
  }
  return {{"spikes", spikes}};
}

json ToJson(const MotionParams& p) {
  json moves = json::array();
  for (const RigidParams& r : p.movements) {
    moves.push_back({{"rotation_deg", r.rotation_deg},
                     {"translation_mm", r.translation_mm}});
  }
  return {{"axis", p.axis}, {"movements", moves}, {"cuts", p.cuts}};
}

GhostingParams GhostingParamsFromJson(const json& j) {
  return {j.at("axis").get<int>(), j.at("num_ghosts").get<int>(),
          j.at("intensity").get<double>(), j.at("restore").get<double>()};
}

SpikeParams SpikeParamsFromJson(const json& j) {
  SpikeParams p;
  for (const json& s : j.at("spikes")) {
    p.spikes.push_back({s.at("bin").get<Index3>(), s.at("intensity").get<double>(),
                        s.at("phase").get<double>()});
  }
  return p;
}

MotionParams MotionParamsFromJson(const json& j) {
  MotionParams p;
  p.axis = j.at("axis").get<int>();
  for (const json& m : j.at("movements")) {
    p.movements.push_back(
        {ReadTriple(m.at("rotation_deg")), ReadTriple(m.at("translation_mm"))});
  }
  p.cuts = j.at("cuts").get<std::vector<int64_t>>();
  return p;
}

}  // namespace ulfsynth
