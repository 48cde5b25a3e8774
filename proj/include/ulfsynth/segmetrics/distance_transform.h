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

#ifndef ULFSYNTH_SEGMETRICS_DISTANCE_TRANSFORM_H_
#define ULFSYNTH_SEGMETRICS_DISTANCE_TRANSFORM_H_

#include <cstdint>
#include <vector>

#include "ulfsynth/volgrid/grid.h"

namespace ulfsynth {

// Exact squared Euclidean distance (mm^2) from every voxel to the nearest
// voxel with features[o] != 0, using separable lower envelopes of parabolas.
// Voxels are +inf when there are no features at all.
std::vector<double> SquaredDistanceTransform(const std::vector<uint8_t>& features,
                                             const Index3& dims,
                                             const Spacing3& spacing);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SEGMETRICS_DISTANCE_TRANSFORM_H_
