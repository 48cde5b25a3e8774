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

#include "ulfsynth/volgrid/resample.h"

#include <cmath>

#include <Eigen/Core>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {
namespace {

// Tolerance (in voxels) for treating a coordinate as on the lattice edge.
constexpr double kEdgeTolerance = 1e-6;

// Splits a continuous coordinate into a base index and weight for linear
// interpolation. Returns false when out of bounds under kZero.
bool LinearAxis(double p, int64_t n, Boundary boundary, int64_t& i0,
                int64_t& i1, double& w) {
  if (boundary == Boundary::kZero) {
    if (p < -kEdgeTolerance || p > static_cast<double>(n - 1) + kEdgeTolerance) {
      return false;
    }
  }
  p = std::clamp(p, 0.0, static_cast<double>(n - 1));
  const double f = std::floor(p);
  i0 = static_cast<int64_t>(f);
  w = p - f;
  i1 = std::min(i0 + 1, n - 1);
  return true;
}

template <typename T>
T NearestAt(std::span<const T> data, const Index3& dims, double x, double y,
            double z) {
  const int64_t i = static_cast<int64_t>(std::floor(x + 0.5));
  const int64_t j = static_cast<int64_t>(std::floor(y + 0.5));
  const int64_t k = static_cast<int64_t>(std::floor(z + 0.5));
  if (i < 0 || j < 0 || k < 0 || i >= dims[0] || j >= dims[1] || k >= dims[2]) {
    return T{0};
  }
  return data[i + dims[0] * (j + dims[1] * k)];
}

// Visits every voxel of `out_grid` with the continuous source index
// produced by `index_of(i, j, k)`.
template <typename T, typename IndexFn, typename SampleFn>
std::vector<T> MapVoxels(const Grid& out_grid, IndexFn index_of,
                         SampleFn sample) {
  const Index3& d = out_grid.dims();
  std::vector<T> out(out_grid.num_voxels());
  int64_t offset = 0;
  for (int64_t k = 0; k < d[2]; ++k) {
    for (int64_t j = 0; j < d[1]; ++j) {
      for (int64_t i = 0; i < d[0]; ++i, ++offset) {
        const Eigen::Vector3d p = index_of(i, j, k, offset);
        out[offset] = sample(p);
      }
    }
  }
  return out;
}

// Source continuous index as an affine function of the target index.
Eigen::Matrix4d TargetToSourceIndex(const Grid& source, const Grid& target) {
  return source.inverse_affine() * target.affine();
}

void CheckField(const Grid& image, const DisplacementField& field) {
  if (!image.SameGeometry(field.grid())) {
    throw ContractError("displacement field grid does not match image grid");
  }
}

}  // namespace

DisplacementField::DisplacementField(Grid grid)
    : grid_(std::move(grid)), vectors_(grid_.num_voxels(), Vector{0, 0, 0}) {}

DisplacementField::DisplacementField(Grid grid, std::vector<Vector> vectors)
    : grid_(std::move(grid)), vectors_(std::move(vectors)) {
  if (static_cast<int64_t>(vectors_.size()) != grid_.num_voxels()) {
    throw ContractError("displacement field size does not match its grid");
  }
  for (const Vector& v : vectors_) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      throw ContractError("displacement field contains NaN/Inf");
    }
  }
}

float SampleLinear(const Volume& source, double x, double y, double z,
                   Boundary boundary) {
  const Index3& d = source.grid().dims();
  int64_t x0, x1, y0, y1, z0, z1;
  double wx, wy, wz;
  if (!LinearAxis(x, d[0], boundary, x0, x1, wx) ||
      !LinearAxis(y, d[1], boundary, y0, y1, wy) ||
      !LinearAxis(z, d[2], boundary, z0, z1, wz)) {
    return 0.0f;
  }
  const auto v = source.data();
  auto at = [&](int64_t i, int64_t j, int64_t k) -> double {
    return v[i + d[0] * (j + d[1] * k)];
  };
  const double c00 = at(x0, y0, z0) * (1 - wx) + at(x1, y0, z0) * wx;
  const double c10 = at(x0, y1, z0) * (1 - wx) + at(x1, y1, z0) * wx;
  const double c01 = at(x0, y0, z1) * (1 - wx) + at(x1, y0, z1) * wx;
  const double c11 = at(x0, y1, z1) * (1 - wx) + at(x1, y1, z1) * wx;
  const double c0 = c00 * (1 - wy) + c10 * wy;
  const double c1 = c01 * (1 - wy) + c11 * wy;
  return static_cast<float>(c0 * (1 - wz) + c1 * wz);
}

Label SampleNearest(const LabelMap& source, double x, double y, double z) {
  return NearestAt<Label>(source.data(), source.grid().dims(), x, y, z);
}

Volume Resample(const Volume& source, const Grid& target,
                Interpolation interpolation, Boundary boundary) {
  const Eigen::Matrix4d m = TargetToSourceIndex(source.grid(), target);
  auto index_of = [&](int64_t i, int64_t j, int64_t k, int64_t) {
    return Eigen::Vector3d(
        (m.topLeftCorner<3, 3>() * Eigen::Vector3d(i, j, k)) +
        m.topRightCorner<3, 1>());
  };
  if (interpolation == Interpolation::kNearest) {
    return Volume(target, MapVoxels<float>(target, index_of,
                                           [&](const Eigen::Vector3d& p) {
                                             return NearestAt<float>(
                                                 source.data(),
                                                 source.grid().dims(), p.x(),
                                                 p.y(), p.z());
                                           }));
  }
  return Volume(target,
                MapVoxels<float>(target, index_of, [&](const Eigen::Vector3d& p) {
                  return SampleLinear(source, p.x(), p.y(), p.z(), boundary);
                }));
}

LabelMap Resample(const LabelMap& source, const Grid& target,
                  Interpolation interpolation) {
  if (interpolation != Interpolation::kNearest) {
    throw ContractError("label maps can only be resampled with nearest");
  }
  const Eigen::Matrix4d m = TargetToSourceIndex(source.grid(), target);
  auto index_of = [&](int64_t i, int64_t j, int64_t k, int64_t) {
    return Eigen::Vector3d(
        (m.topLeftCorner<3, 3>() * Eigen::Vector3d(i, j, k)) +
        m.topRightCorner<3, 1>());
  };
  return LabelMap(target,
                  MapVoxels<Label>(target, index_of,
                                   [&](const Eigen::Vector3d& p) {
                                     return SampleNearest(source, p.x(), p.y(),
                                                          p.z());
                                   }),
                  source.vocabulary());
}

namespace {

// Source continuous index for a backward warp on the image's own grid:
// x + A^-1 * d(x).
auto WarpIndex(const Grid& grid, const DisplacementField& field) {
  const Eigen::Matrix3d inv = grid.inverse_affine().topLeftCorner<3, 3>();
  return [inv, &field](int64_t i, int64_t j, int64_t k, int64_t offset) {
    const auto& d = field[offset];
    return Eigen::Vector3d(Eigen::Vector3d(i, j, k) +
                           inv * Eigen::Vector3d(d[0], d[1], d[2]));
  };
}

}  // namespace

Volume Warp(const Volume& source, const DisplacementField& field,
            Interpolation interpolation) {
  CheckField(source.grid(), field);
  auto index_of = WarpIndex(source.grid(), field);
  if (interpolation == Interpolation::kNearest) {
    return Volume(source.grid(),
                  MapVoxels<float>(source.grid(), index_of,
                                   [&](const Eigen::Vector3d& p) {
                                     return NearestAt<float>(
                                         source.data(), source.grid().dims(),
                                         p.x(), p.y(), p.z());
                                   }));
  }
  return Volume(source.grid(),
                MapVoxels<float>(source.grid(), index_of,
                                 [&](const Eigen::Vector3d& p) {
                                   return SampleLinear(source, p.x(), p.y(),
                                                       p.z());
                                 }));
}

LabelMap Warp(const LabelMap& source, const DisplacementField& field,
              Interpolation interpolation) {
  if (interpolation != Interpolation::kNearest) {
    throw ContractError("label maps can only be warped with nearest");
  }
  CheckField(source.grid(), field);
  auto index_of = WarpIndex(source.grid(), field);
  return LabelMap(source.grid(),
                  MapVoxels<Label>(source.grid(), index_of,
                                   [&](const Eigen::Vector3d& p) {
                                     return SampleNearest(source, p.x(), p.y(),
                                                          p.z());
                                   }),
                  source.vocabulary());
}

}  // namespace ulfsynth
