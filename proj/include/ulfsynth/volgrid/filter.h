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

#ifndef ULFSYNTH_VOLGRID_FILTER_H_
#define ULFSYNTH_VOLGRID_FILTER_H_

#include <array>
#include <vector>

#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

// Normalized, truncated (4 sigma) sampled Gaussian for `sigma_voxels`.
// Returns {1} for sigma below 1e-3 voxels.
std::vector<double> GaussianKernel(double sigma_voxels);

// Separable Gaussian blur with per-axis sigma in mm. Edges are replicated,
// so constant images stay constant. Zero sigma leaves an axis untouched.
Volume GaussianSmooth(const Volume& volume,
                      const std::array<double, 3>& sigma_mm);

// Standard deviation of a Gaussian with the given full width at half
// maximum.
inline double FwhmToSigma(double fwhm) { return fwhm / 2.354820045030949; }

}  // namespace ulfsynth

#endif  // ULFSYNTH_VOLGRID_FILTER_H_
