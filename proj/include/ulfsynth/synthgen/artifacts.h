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

#ifndef ULFSYNTH_SYNTHGEN_ARTIFACTS_H_
#define ULFSYNTH_SYNTHGEN_ARTIFACTS_H_

#include <array>
#include <vector>

#include "json.hpp"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/synthgen/transform.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

struct GhostingParams {
  int axis = 0;
  int num_ghosts = 2;
  double intensity = 0.0;
  double restore = 0.06;
};

struct Spike {
  // FFT bin (unshifted layout).
  Index3 bin{0, 0, 0};
  // Magnitude as a fraction of max |k|.
  double intensity = 0.0;
  double phase = 0.0;
};

struct SpikeParams {
  std::vector<Spike> spikes;
};

struct RigidParams {
  std::array<double, 3> rotation_deg{0, 0, 0};
  std::array<double, 3> translation_mm{0, 0, 0};
};

struct MotionParams {
  int axis = 0;
  std::vector<RigidParams> movements;
  // Sorted block boundaries in centred (fftshifted) bin order, one per
  // movement, each in [1, n - 1].
  std::vector<int64_t> cuts;
};

// Bins with signed frequency k = 0 (mod g) along the axis are scaled by
// (1 - intensity), except |k| < restore * n / 2.
GhostingParams SampleGhostingParams(Rng& rng, const GhostingConfig& config);
Volume ApplyGhosting(const Volume& volume, const GhostingParams& params);

// Adds intensity * max|k| * exp(i phase) at each bin; bins are never DC.
SpikeParams SampleSpikeParams(Rng& rng, const SpikeConfig& config,
                              const Index3& dims);
Volume ApplySpikes(const Volume& volume, const SpikeParams& params);

// Rigidly moved copies fill k-space blocks along the phase-encode axis. The
// block holding k = 0 keeps the unmoved spectrum; the remaining blocks take
// the moved copies in order.
MotionParams SampleMotionParams(Rng& rng, const MotionConfig& config,
                                const Index3& dims);
Volume ApplyMotion(const Volume& volume, const MotionParams& params);

nlohmann::json ToJson(const GhostingParams& params);
nlohmann::json ToJson(const SpikeParams& params);
nlohmann::json ToJson(const MotionParams& params);
GhostingParams GhostingParamsFromJson(const nlohmann::json& json);
SpikeParams SpikeParamsFromJson(const nlohmann::json& json);
MotionParams MotionParamsFromJson(const nlohmann::json& json);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_ARTIFACTS_H_
