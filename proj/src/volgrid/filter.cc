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

#include "ulfsynth/volgrid/filter.h"

#include <algorithm>
#include <cmath>

namespace ulfsynth {

std::vector<double> GaussianKernel(double sigma_voxels) {
  if (!(sigma_voxels >= 1e-3)) return {1.0};
  const int radius = static_cast<int>(std::ceil(4.0 * sigma_voxels));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * (t * t) / (sigma_voxels * sigma_voxels));
    kernel[t + radius] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

Volume GaussianSmooth(const Volume& volume,
                      const std::array<double, 3>& sigma_mm) {
  const Grid& grid = volume.grid();
  const Index3& d = grid.dims();
  std::vector<double> buf(volume.data().begin(), volume.data().end());
  std::vector<double> line;
  for (int axis = 0; axis < 3; ++axis) {
    const std::vector<double> kernel =
        GaussianKernel(sigma_mm[axis] / grid.spacing()[axis]);
    if (kernel.size() == 1) continue;
    const int radius = static_cast<int>(kernel.size() / 2);
    const int64_t n = d[axis];
    const int64_t stride = axis == 0 ? 1 : (axis == 1 ? d[0] : d[0] * d[1]);
    line.resize(n);
    // Iterate over every 1-D line along `axis`.
    const int64_t outer = grid.num_voxels() / n;
    for (int64_t l = 0; l < outer; ++l) {
      // Decompose the line id into the start offset.
      int64_t start;
      if (axis == 0) {
        start = l * d[0];
      } else if (axis == 1) {
        start = (l % d[0]) + (l / d[0]) * d[0] * d[1];
      } else {
        start = l;
      }
      for (int64_t t = 0; t < n; ++t) line[t] = buf[start + t * stride];
      for (int64_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int r = -radius; r <= radius; ++r) {
          const int64_t s = std::clamp<int64_t>(t + r, 0, n - 1);
          acc += kernel[r + radius] * line[s];
        }
        buf[start + t * stride] = acc;
      }
    }
  }
  return Volume(grid, std::vector<float>(buf.begin(), buf.end()));
}

}  // namespace ulfsynth
