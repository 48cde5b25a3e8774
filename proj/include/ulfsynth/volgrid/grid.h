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

#ifndef ULFSYNTH_VOLGRID_GRID_H_
#define ULFSYNTH_VOLGRID_GRID_H_

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace ulfsynth {

using Index3 = std::array<int64_t, 3>;
using Spacing3 = std::array<double, 3>;

// Voxel lattice plus its placement in world space (mm).
//
// Voxel (i, j, k) has its center at affine * (i, j, k, 1). Storage order is
// i fastest, then j, then k, matching the on-disk NIfTI order. The spacing
// is not independent state: it always equals the column norms of the
// affine's 3x3 block.
class Grid {
 public:
  // Axis-aligned grid with voxel (0,0,0) at the world origin.
  Grid(const Index3& dims, const Spacing3& spacing);
  // Spacing derived from the affine's column norms. Throws ContractError for
  // non-positive dims or a singular 3x3 block.
  static Grid FromAffine(const Index3& dims, const Eigen::Matrix4d& affine);

  const Index3& dims() const { return dims_; }
  const Spacing3& spacing() const { return spacing_; }
  const Eigen::Matrix4d& affine() const { return affine_; }
  const Eigen::Matrix4d& inverse_affine() const { return inverse_; }

  int64_t num_voxels() const { return dims_[0] * dims_[1] * dims_[2]; }
  double voxel_volume() const {
    return spacing_[0] * spacing_[1] * spacing_[2];
  }

  int64_t Offset(int64_t i, int64_t j, int64_t k) const {
    return i + dims_[0] * (j + dims_[1] * k);
  }
  Index3 IndexOf(int64_t offset) const {
    const int64_t i = offset % dims_[0];
    const int64_t rest = offset / dims_[0];
    return {i, rest % dims_[1], rest / dims_[1]};
  }
  bool Contains(int64_t i, int64_t j, int64_t k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_[0] && j < dims_[1] &&
           k < dims_[2];
  }

  Eigen::Vector3d VoxelToWorld(const Eigen::Vector3d& index) const;
  Eigen::Vector3d WorldToVoxel(const Eigen::Vector3d& world) const;
  // World position of the geometric center of the voxel lattice.
  Eigen::Vector3d Center() const;

  // Same dims and affines equal within `tolerance` (absolute, per entry).
  bool SameGeometry(const Grid& other, double tolerance = 1e-4) const;

 private:
  Grid() = default;

  Index3 dims_;
  Spacing3 spacing_;
  Eigen::Matrix4d affine_;
  Eigen::Matrix4d inverse_;
};

}  // namespace ulfsynth

#endif  // ULFSYNTH_VOLGRID_GRID_H_
