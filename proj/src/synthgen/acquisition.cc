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

#include "ulfsynth/synthgen/acquisition.h"

#include <cmath>

#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/filter.h"
#include "ulfsynth/volgrid/resample.h"

namespace ulfsynth {

using nlohmann::json;

namespace {

void RequireIsotropic(const Grid& grid) {
  const Spacing3& s = grid.spacing();
  if (std::abs(s[0] - s[1]) > 1e-6 * s[0] || std::abs(s[0] - s[2]) > 1e-6 * s[0]) {
    throw ContractError("acquisition simulation needs isotropic input, got spacing " +
                        std::to_string(s[0]) + " x " + std::to_string(s[1]) +
                        " x " + std::to_string(s[2]));
  }
}

}  // namespace

Grid SliceGrid(const Grid& grid, int axis, double thickness_mm) {
  if (axis < 0 || axis > 2) throw ContractError("axis must be 0, 1 or 2");
  if (!(thickness_mm > 0)) throw ContractError("slice thickness must be positive");
  const double tau = thickness_mm / grid.spacing()[axis];
  Index3 dims = grid.dims();
  dims[axis] = static_cast<int64_t>(std::ceil(static_cast<double>(dims[axis]) / tau - 1e-9));
  // Coarse index k maps to fine index (k + 0.5) tau - 0.5 along the axis.
  Eigen::Matrix4d to_fine = Eigen::Matrix4d::Identity();
  to_fine(axis, axis) = tau;
  to_fine(axis, 3) = 0.5 * tau - 0.5;
  return Grid::FromAffine(dims, grid.affine() * to_fine);
}

AcquisitionParams SampleAcquisitionParams(Rng& rng,
                                          const GeneratorConfig& config) {
  const auto& axes = config.resolution.axes;
  AcquisitionParams p;
  p.axis = axes[std::uniform_int_distribution<size_t>(0, axes.size() - 1)(rng)];
  const Range& r = config.resolution.slice_thickness_mm;
  p.thickness_mm =
      r.lo == r.hi ? r.lo : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  return p;
}

AcquisitionOutput SimulateAcquisition(const Volume& volume,
                                      const AcquisitionParams& params) {
  RequireIsotropic(volume.grid());
  const Grid slices = SliceGrid(volume.grid(), params.axis, params.thickness_mm);
  std::array<double, 3> sigma{0, 0, 0};
  sigma[params.axis] = FwhmToSigma(params.thickness_mm);
  const Volume blurred = GaussianSmooth(volume, sigma);
  const Volume thick =
      Resample(blurred, slices, Interpolation::kLinear, Boundary::kClamp);
  Volume back = Resample(thick, volume.grid(), Interpolation::kLinear, Boundary::kClamp);
  return {std::move(back), slices};
}

Volume SimulateAcquisition(const Volume& volume, Rng& rng,
                           const GeneratorConfig& config) {
  return SimulateAcquisition(volume, SampleAcquisitionParams(rng, config)).image;
}

json ToJson(const AcquisitionParams& p) {
  return {{"axis", p.axis}, {"thickness_mm", p.thickness_mm}};
}

AcquisitionParams AcquisitionParamsFromJson(const json& j) {
  return {j.at("axis").get<int>(), j.at("thickness_mm").get<double>()};
}

}  // namespace ulfsynth
