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

#ifndef ULFSYNTH_SYNTHGEN_TRANSFORM_H_
#define ULFSYNTH_SYNTHGEN_TRANSFORM_H_

#include <array>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/volgrid/resample.h"

namespace ulfsynth {

struct AffineParams {
  std::array<double, 3> rotation_deg{0, 0, 0};
  std::array<double, 3> scale{1, 1, 1};
  std::array<double, 3> translation_mm{0, 0, 0};
  std::array<double, 3> shear{0, 0, 0};
};

struct TransformParams {
  AffineParams affine;
  Index3 control_grid{2, 2, 2};
  // Backward displacement in mm at each control node, i fastest.
  std::vector<std::array<double, 3>> control_offsets_mm;
};

// Output world point w samples the input at affine * w + displacement(w).
// `affine` is the inverse of the forward (content-moving) transform.
struct SpatialTransform {
  Eigen::Matrix4d affine;
  DisplacementField displacement;

  // Single dense field realizing the whole transform on the displacement
  // grid, suitable for Warp.
  DisplacementField ToField() const;
};

// Forward transform about `center`: T(c) Tr R S_h S T(-c), R = Rz Ry Rx.
Eigen::Matrix4d ForwardAffine(const AffineParams& params,
                              const Eigen::Vector3d& center);

TransformParams SampleTransformParams(Rng& rng, const GeneratorConfig& config);
SpatialTransform BuildTransform(const TransformParams& params,
                                const Grid& grid);
SpatialTransform SampleTransform(Rng& rng, const GeneratorConfig& config,
                                 const Grid& grid);

// Trilinear upsampling of per-node values; node n sits at voxel
// n * (dim - 1) / (nodes - 1). `values` holds `channels` doubles per node.
std::vector<double> UpsampleControlGrid(const std::vector<double>& values,
                                        const Index3& nodes, int channels,
                                        const Index3& dims);

nlohmann::json ToJson(const TransformParams& params);
TransformParams TransformParamsFromJson(const nlohmann::json& json);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_TRANSFORM_H_
