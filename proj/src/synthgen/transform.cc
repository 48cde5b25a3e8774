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

#include "ulfsynth/synthgen/transform.h"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

double Uniform(Rng& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

Eigen::Matrix4d Translation(const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topRightCorner<3, 1>() = t;
  return m;
}

// Node coordinate of voxel i along an axis: i * (nodes - 1) / (dim - 1).
struct AxisWeights {
  std::vector<int64_t> lo;
  std::vector<double> frac;
};

AxisWeights Weights(int64_t nodes, int64_t dim) {
  AxisWeights w;
  w.lo.resize(dim);
  w.frac.resize(dim);
  for (int64_t i = 0; i < dim; ++i) {
    const double u =
        dim == 1 ? 0.0
                 : static_cast<double>(i) * static_cast<double>(nodes - 1) /
                       static_cast<double>(dim - 1);
    int64_t lo = static_cast<int64_t>(std::floor(u));
    if (lo >= nodes - 1) lo = nodes - 2;
    w.lo[i] = lo;
    w.frac[i] = u - static_cast<double>(lo);
  }
  return w;
}

std::array<double, 3> ReadTriple(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

std::vector<double> UpsampleControlGrid(const std::vector<double>& values,
                                        const Index3& nodes, int channels,
                                        const Index3& dims) {
  for (int64_t n : nodes) {
    if (n < 2) throw ContractError("control grid needs at least 2 nodes per axis");
  }
  if (static_cast<int64_t>(values.size()) !=
      nodes[0] * nodes[1] * nodes[2] * channels) {
    throw ContractError("control grid value count does not match its dims");
  }
  const AxisWeights wx = Weights(nodes[0], dims[0]);
  const AxisWeights wy = Weights(nodes[1], dims[1]);
  const AxisWeights wz = Weights(nodes[2], dims[2]);
  auto node = [&](int64_t a, int64_t b, int64_t c, int ch) {
    return values[(a + nodes[0] * (b + nodes[1] * c)) * channels + ch];
  };
  std::vector<double> out(dims[0] * dims[1] * dims[2] * channels);
  int64_t offset = 0;
  for (int64_t k = 0; k < dims[2]; ++k) {
    const int64_t c0 = wz.lo[k];
    const double fz = wz.frac[k];
    for (int64_t j = 0; j < dims[1]; ++j) {
      const int64_t b0 = wy.lo[j];
      const double fy = wy.frac[j];
      for (int64_t i = 0; i < dims[0]; ++i, ++offset) {
        const int64_t a0 = wx.lo[i];
        const double fx = wx.frac[i];
        for (int ch = 0; ch < channels; ++ch) {
          const double c00 = node(a0, b0, c0, ch) * (1 - fx) + node(a0 + 1, b0, c0, ch) * fx;
          const double c10 = node(a0, b0 + 1, c0, ch) * (1 - fx) +
                             node(a0 + 1, b0 + 1, c0, ch) * fx;
          const double c01 = node(a0, b0, c0 + 1, ch) * (1 - fx) +
                             node(a0 + 1, b0, c0 + 1, ch) * fx;
          const double c11 = node(a0, b0 + 1, c0 + 1, ch) * (1 - fx) +
                             node(a0 + 1, b0 + 1, c0 + 1, ch) * fx;
          const double v0 = c00 * (1 - fy) + c10 * fy;
          const double v1 = c01 * (1 - fy) + c11 * fy;
          out[offset * channels + ch] = v0 * (1 - fz) + v1 * fz;
        }
      }
    }
  }
  return out;
}

Eigen::Matrix4d ForwardAffine(const AffineParams& p,
                              const Eigen::Vector3d& center) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const Eigen::Matrix3d rotation =
      (Eigen::AngleAxisd(p.rotation_deg[2] * kDeg, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(p.rotation_deg[1] * kDeg, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(p.rotation_deg[0] * kDeg, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  Eigen::Matrix3d shear = Eigen::Matrix3d::Identity();
  shear(0, 1) = p.shear[0];
  shear(0, 2) = p.shear[1];
  shear(1, 2) = p.shear[2];
  const Eigen::Matrix3d scale =
      Eigen::Vector3d(p.scale[0], p.scale[1], p.scale[2]).asDiagonal();
  Eigen::Matrix4d linear = Eigen::Matrix4d::Identity();
  linear.topLeftCorner<3, 3>() = rotation * shear * scale;
  const Eigen::Vector3d t(p.translation_mm[0], p.translation_mm[1],
                          p.translation_mm[2]);
  return Translation(center) * Translation(t) * linear * Translation(-center);
}

TransformParams SampleTransformParams(Rng& rng, const GeneratorConfig& config) {
  TransformParams p;
  const AffineRanges& r = config.affine;
  for (int a = 0; a < 3; ++a) p.affine.rotation_deg[a] = Uniform(rng, r.rotation_deg[a]);
  for (int a = 0; a < 3; ++a) p.affine.scale[a] = Uniform(rng, r.scale[a]);
  for (int a = 0; a < 3; ++a) p.affine.translation_mm[a] = Uniform(rng, r.translation_mm[a]);
  for (int a = 0; a < 3; ++a) p.affine.shear[a] = Uniform(rng, r.shear[a]);
  p.control_grid = config.nonrigid.control_grid;
  const double m = config.nonrigid.max_displacement_mm;
  const Range range{-m, m};
  p.control_offsets_mm.resize(p.control_grid[0] * p.control_grid[1] *
                              p.control_grid[2]);
  for (auto& v : p.control_offsets_mm) {
    for (double& c : v) c = Uniform(rng, range);
  }
  return p;
}

SpatialTransform BuildTransform(const TransformParams& params,
                                const Grid& grid) {
  const Eigen::Matrix4d forward = ForwardAffine(params.affine, grid.Center());
  if (std::abs(forward.topLeftCorner<3, 3>().determinant()) < 1e-12) {
    throw ContractError("sampled affine is singular");
  }
  const Eigen::Matrix4d backward = forward.inverse();

  std::vector<double> flat;
  flat.reserve(params.control_offsets_mm.size() * 3);
  bool all_zero = true;
  for (const auto& v : params.control_offsets_mm) {
    for (double c : v) {
      flat.push_back(c);
      all_zero = all_zero && c == 0.0;
    }
  }
  if (all_zero) return {backward, DisplacementField(grid)};
  const std::vector<double> dense =
      UpsampleControlGrid(flat, params.control_grid, 3, grid.dims());
  std::vector<DisplacementField::Vector> vectors(grid.num_voxels());
  for (int64_t o = 0; o < grid.num_voxels(); ++o) {
    vectors[o] = {static_cast<float>(dense[3 * o]),
                  static_cast<float>(dense[3 * o + 1]),
                  static_cast<float>(dense[3 * o + 2])};
  }
  return {backward, DisplacementField(grid, std::move(vectors))};
}

SpatialTransform SampleTransform(Rng& rng, const GeneratorConfig& config,
                                 const Grid& grid) {
  return BuildTransform(SampleTransformParams(rng, config), grid);
}

DisplacementField SpatialTransform::ToField() const {
  const Grid& grid = displacement.grid();
  const Eigen::Matrix4d delta = affine - Eigen::Matrix4d::Identity();
  const bool identity = delta.cwiseAbs().maxCoeff() == 0.0;
  std::vector<DisplacementField::Vector> vectors(grid.num_voxels());
  for (int64_t o = 0; o < grid.num_voxels(); ++o) {
    const DisplacementField::Vector& d = displacement[o];
    if (identity) {
      vectors[o] = d;
      continue;
    }
    const Index3 idx = grid.IndexOf(o);
    const Eigen::Vector3d w = grid.VoxelToWorld(
        Eigen::Vector3d(static_cast<double>(idx[0]), static_cast<double>(idx[1]),
                        static_cast<double>(idx[2])));
    const Eigen::Vector3d shift =
        delta.topLeftCorner<3, 3>() * w + delta.topRightCorner<3, 1>();
    vectors[o] = {static_cast<float>(shift.x() + d[0]),
                  static_cast<float>(shift.y() + d[1]),
                  static_cast<float>(shift.z() + d[2])};
  }
  return DisplacementField(grid, std::move(vectors));
}

json ToJson(const TransformParams& p) {
  return {{"rotation_deg", p.affine.rotation_deg},
          {"scale", p.affine.scale},
          {"translation_mm", p.affine.translation_mm},
          {"shear", p.affine.shear},
          {"control_grid", p.control_grid},
          {"control_offsets_mm", p.control_offsets_mm}};
}

TransformParams TransformParamsFromJson(const json& j) {
  TransformParams p;
  p.affine.rotation_deg = ReadTriple(j.at("rotation_deg"));
  p.affine.scale = ReadTriple(j.at("scale"));
  p.affine.translation_mm = ReadTriple(j.at("translation_mm"));
  p.affine.shear = ReadTriple(j.at("shear"));
  p.control_grid = j.at("control_grid").get<Index3>();
  for (const json& v : j.at("control_offsets_mm")) {
    p.control_offsets_mm.push_back(ReadTriple(v));
  }
  return p;
}

}  // namespace ulfsynth
