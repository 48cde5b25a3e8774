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

#ifndef ULFSYNTH_TESTS_METRIC_ORACLE_H_
#define ULFSYNTH_TESTS_METRIC_ORACLE_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace ulfsynth::testing {

// Brute-force reference for the segmentation metrics: explicit surface
// extraction and all-pairs distances, no distance transform.
struct OracleMetrics {
  double dsc, hd, hd95, assd, rve;
};

struct Voxel {
  int64_t i, j, k;
};

inline std::vector<Voxel> OracleSurface(const std::vector<uint8_t>& m,
                                        const std::array<int64_t, 3>& d) {
  auto at = [&](int64_t i, int64_t j, int64_t k) -> bool {
    if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) return false;
    return m[i + d[0] * (j + d[1] * k)] != 0;
  };
  std::vector<Voxel> s;
  for (int64_t k = 0; k < d[2]; ++k)
    for (int64_t j = 0; j < d[1]; ++j)
      for (int64_t i = 0; i < d[0]; ++i) {
        if (!at(i, j, k)) continue;
        const int64_t n[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                 {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        bool border = false;
        for (const auto& q : n) border = border || !at(q[0], q[1], q[2]);
        if (border) s.push_back({i, j, k});
      }
  return s;
}

inline std::vector<double> OracleDirected(const std::vector<Voxel>& from,
                                          const std::vector<Voxel>& to,
                                          const std::array<double, 3>& sp) {
  std::vector<double> out;
  for (const Voxel& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Voxel& b : to) {
      const double dx = (a.i - b.i) * sp[0], dy = (a.j - b.j) * sp[1],
                   dz = (a.k - b.k) * sp[2];
      best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    out.push_back(best);
  }
  return out;
}

// Both masks must be non-empty.
inline OracleMetrics BruteForceMetrics(const std::vector<uint8_t>& p,
                                       const std::vector<uint8_t>& g,
                                       const std::array<int64_t, 3>& dims,
                                       const std::array<double, 3>& spacing) {
  double np = 0, ng = 0, both = 0;
  for (size_t o = 0; o < p.size(); ++o) {
    np += p[o] != 0;
    ng += g[o] != 0;
    both += p[o] && g[o];
  }
  const auto sp = OracleSurface(p, dims), sg = OracleSurface(g, dims);
  const std::vector<double> ab = OracleDirected(sp, sg, spacing);
  const std::vector<double> ba = OracleDirected(sg, sp, spacing);
  std::vector<double> pooled = ab;
  pooled.insert(pooled.end(), ba.begin(), ba.end());
  std::sort(pooled.begin(), pooled.end());
  const double pos = 0.95 * (pooled.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const double hd95 = lo + 1 < pooled.size()
                          ? pooled[lo] + (pos - lo) * (pooled[lo + 1] - pooled[lo])
                          : pooled[lo];
  double sum = 0;
  for (double v : pooled) sum += v;
  return {2 * both / (np + ng), pooled.back(), hd95, sum / pooled.size(),
          std::abs(np - ng) / ng};
}

}  // namespace ulfsynth::testing

#endif  // ULFSYNTH_TESTS_METRIC_ORACLE_H_
