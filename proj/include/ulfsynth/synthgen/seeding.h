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

#ifndef ULFSYNTH_SYNTHGEN_SEEDING_H_
#define ULFSYNTH_SYNTHGEN_SEEDING_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace ulfsynth {

using Rng = std::mt19937_64;

// Per-sample seed: FNV-1a over the little-endian dataset seed, the subject id
// bytes, epoch and index, finished with the splitmix64 mixer.
uint64_t SampleSeed(uint64_t dataset_seed, std::string_view subject_id,
                    uint64_t epoch, uint64_t index);

// Independent stream for one pipeline stage.
uint64_t StageSeed(uint64_t sample_seed, std::string_view stage);

inline Rng StageRng(uint64_t sample_seed, std::string_view stage) {
  return Rng(StageSeed(sample_seed, stage));
}

uint64_t SplitMix64(uint64_t x);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_SEEDING_H_
