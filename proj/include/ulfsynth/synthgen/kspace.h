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

#ifndef ULFSYNTH_SYNTHGEN_KSPACE_H_
#define ULFSYNTH_SYNTHGEN_KSPACE_H_

#include <complex>
#include <cstdint>
#include <vector>

#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

using Complex = std::complex<double>;

// 3-D DFT in the volume's memory layout (i fastest). The forward transform is
// unnormalized; the inverse divides by the voxel count.
std::vector<Complex> ForwardFft(const Volume& volume);
std::vector<Complex> InverseFft(std::vector<Complex> spectrum,
                                const Index3& dims);

// Signed frequency of FFT bin `p` on an axis of length `n`
// (0, 1, ..., n/2, -(n-1)/2, ..., -1).
inline int64_t SignedFrequency(int64_t p, int64_t n) {
  return p <= n / 2 ? p : p - n;
}

// Real part clamped to [0, 1].
Volume RealPartClamped(const std::vector<Complex>& values, const Grid& grid);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SYNTHGEN_KSPACE_H_
