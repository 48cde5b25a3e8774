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

#include "ulfsynth/segmetrics/distance_transform.h"

#include <limits>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One pass of the lower-envelope transform over a line of n samples spaced
// `step` mm apart: out[p] = min_q f[q] + (step * (p - q))^2.
void Envelope1d(const double* f, double* out, int64_t n, double step,
                std::vector<int64_t>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int64_t k = -1;
  auto pos = [step](int64_t q) { return step * static_cast<double>(q); };
  for (int64_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double xq = pos(q);
    while (k >= 0) {
      const double xv = pos(v[k]);
      const double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2 * (xq - xv));
      if (s > z[k]) {
        v[++k] = q;
        z[k] = s;
        z[k + 1] = kInf;
        break;
      }
      --k;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
    }
  }
  if (k < 0) {
    for (int64_t p = 0; p < n; ++p) out[p] = kInf;
    return;
  }
  int64_t j = 0;
  for (int64_t p = 0; p < n; ++p) {
    const double xp = pos(p);
    while (z[j + 1] < xp) ++j;
    const double d = xp - pos(v[j]);
    out[p] = f[v[j]] + d * d;
  }
}

}  // namespace

std::vector<double> SquaredDistanceTransform(const std::vector<uint8_t>& features,
                                             const Index3& dims,
                                             const Spacing3& spacing) {
  const int64_t total = dims[0] * dims[1] * dims[2];
  if (static_cast<int64_t>(features.size()) != total) {
    throw ContractError("feature mask size does not match the grid");
  }
  std::vector<double> d(total);
  for (int64_t o = 0; o < total; ++o) d[o] = features[o] ? 0.0 : kInf;

  std::vector<int64_t> v;
  std::vector<double> z;
  const int64_t strides[3] = {1, dims[0], dims[0] * dims[1]};
  for (int axis = 0; axis < 3; ++axis) {
    const int64_t n = dims[axis];
    const int64_t stride = strides[axis];
    std::vector<double> line(n), out(n);
    for (int64_t start = 0; start < total; ++start) {
      // Visit each line once, from its first voxel.
      if ((start / stride) % n != 0) continue;
      for (int64_t p = 0; p < n; ++p) line[p] = d[start + p * stride];
      Envelope1d(line.data(), out.data(), n, spacing[axis], v, z);
      for (int64_t p = 0; p < n; ++p) d[start + p * stride] = out[p];
    }
  }
  return d;
}

}  // namespace ulfsynth
