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

#ifndef ULFSYNTH_VOLGRID_RESAMPLE_H_
#define ULFSYNTH_VOLGRID_RESAMPLE_H_

#include <array>
#include <vector>

#include "ulfsynth/volgrid/grid.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

enum class Interpolation { kLinear, kNearest };

// What a sample outside the source lattice returns. kZero is the default
// everywhere; kClamp extends edge voxels and is used where the caller knows
// the target lattice covers the same physical extent (slice-thickness
// simulation).
enum class Boundary { kZero, kClamp };

// Dense backward displacement (mm, world axes) defined on a grid: output
// voxel x samples the source at world(x) + field(x).
class DisplacementField {
 public:
  using Vector = std::array<float, 3>;

  // Zero field.
  explicit DisplacementField(Grid grid);
  // Throws ContractError on size mismatch or non-finite entries.
  DisplacementField(Grid grid, std::vector<Vector> vectors);

  const Grid& grid() const { return grid_; }
  const std::vector<Vector>& vectors() const { return vectors_; }
  const Vector& operator[](int64_t offset) const { return vectors_[offset]; }

 private:
  Grid grid_;
  std::vector<Vector> vectors_;
};

// Samples `source` at the world position of every voxel of `target`.
// A linear sample is in bounds when every continuous source index lies in
// [0, n-1]; a nearest sample when the rounded index is inside the lattice.
Volume Resample(const Volume& source, const Grid& target,
                Interpolation interpolation,
                Boundary boundary = Boundary::kZero);
// Label maps only support nearest; kLinear throws ContractError.
LabelMap Resample(const LabelMap& source, const Grid& target,
                  Interpolation interpolation = Interpolation::kNearest);

// Throws ContractError if the field grid differs from the image grid.
Volume Warp(const Volume& source, const DisplacementField& field,
            Interpolation interpolation);
LabelMap Warp(const LabelMap& source, const DisplacementField& field,
              Interpolation interpolation = Interpolation::kNearest);

// Continuous-index samplers shared with the generator.
float SampleLinear(const Volume& source, double x, double y, double z,
                   Boundary boundary = Boundary::kZero);
Label SampleNearest(const LabelMap& source, double x, double y, double z);

}  // namespace ulfsynth

#endif  // ULFSYNTH_VOLGRID_RESAMPLE_H_
