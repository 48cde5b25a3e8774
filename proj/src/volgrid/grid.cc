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

#include "ulfsynth/volgrid/grid.h"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {
namespace {

void CheckDims(const Index3& dims) {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) {
      throw ContractError("grid dim " + std::to_string(a) +
                          " must be >= 1, got " + std::to_string(dims[a]));
    }
  }
}

}  // namespace

Grid::Grid(const Index3& dims, const Spacing3& spacing)
    : dims_(dims), spacing_(spacing), affine_(Eigen::Matrix4d::Identity()) {
  CheckDims(dims);
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw ContractError("grid spacing must be positive and finite");
    }
    affine_(a, a) = spacing[a];
  }
  inverse_ = affine_.inverse();
}

Grid Grid::FromAffine(const Index3& dims, const Eigen::Matrix4d& affine) {
  CheckDims(dims);
  if (!affine.allFinite()) throw ContractError("grid affine is not finite");
  const Eigen::Matrix3d linear = affine.topLeftCorner<3, 3>();
  const double det = linear.determinant();
  if (!(std::abs(det) > 1e-12)) {
    throw ContractError("grid affine has a singular 3x3 block");
  }
  Grid grid;
  grid.dims_ = dims;
  grid.affine_ = affine;
  for (int a = 0; a < 3; ++a) grid.spacing_[a] = linear.col(a).norm();
  grid.affine_.row(3) << 0.0, 0.0, 0.0, 1.0;
  grid.inverse_ = grid.affine_.inverse();
  return grid;
}

Eigen::Vector3d Grid::VoxelToWorld(const Eigen::Vector3d& index) const {
  return affine_.topLeftCorner<3, 3>() * index + affine_.topRightCorner<3, 1>();
}

Eigen::Vector3d Grid::WorldToVoxel(const Eigen::Vector3d& world) const {
  return inverse_.topLeftCorner<3, 3>() * world +
         inverse_.topRightCorner<3, 1>();
}

Eigen::Vector3d Grid::Center() const {
  return VoxelToWorld(Eigen::Vector3d((dims_[0] - 1) / 2.0,
                                      (dims_[1] - 1) / 2.0,
                                      (dims_[2] - 1) / 2.0));
}

bool Grid::SameGeometry(const Grid& other, double tolerance) const {
  if (dims_ != other.dims_) return false;
  return ((affine_ - other.affine_).cwiseAbs().maxCoeff() <= tolerance);
}

}  // namespace ulfsynth
