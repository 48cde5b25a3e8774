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

#ifndef ULFSYNTH_SYNTHGEN_ACQUISITION_H_
#define ULFSYNTH_SYNTHGEN_ACQUISITION_H_

#include "json.hpp"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

struct AcquisitionParams {
  int axis = 2;
  double thickness_mm = 1.0;
};

struct AcquisitionOutput {
  Volume image;
  // Thick-slice grid the volume passed through.
  Grid slice_grid;
};

// ceil(n / tau) slices along `axis`; slice k is centred at input index
// (k + 0.5) tau - 0.5 (tau in voxels).
Grid SliceGrid(const Grid& grid, int axis, double thickness_mm);

AcquisitionParams SampleAcquisitionParams(Rng& rng,
                                          const GeneratorConfig& config);

// Blur along the axis with FWHM = thickness, linear resample onto the slice
// grid and back. Throws ContractError for anisotropic input.
AcquisitionOutput SimulateAcquisition(const Volume& volume,
                                      const AcquisitionParams& params);
Volume SimulateAcquisition(const Volume& volume, Rng& rng,
                           const GeneratorConfig& config);

nlohmann::json ToJson(const AcquisitionParams& params);
AcquisitionParams AcquisitionParamsFromJson(const nlohmann::json& json);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_ACQUISITION_H_
