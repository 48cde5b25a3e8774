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

#include "ulfsynth/synthgen/kspace.h"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

class FftwBuffer {
 public:
  explicit FftwBuffer(size_t n)
      : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* get() { return data_; }

 private:
  fftw_complex* data_;
};

void Transform(std::vector<Complex>& values, const Index3& dims, int sign) {
  const size_t n = values.size();
  FftwBuffer buffer(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    // Row-major in FFTW terms: the last listed dimension varies fastest.
    plan = fftw_plan_dft_3d(static_cast<int>(dims[2]), static_cast<int>(dims[1]),
                            static_cast<int>(dims[0]), buffer.get(), buffer.get(),
                            sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  static_assert(sizeof(Complex) == sizeof(fftw_complex));
  std::memcpy(buffer.get(), values.data(), n * sizeof(Complex));
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(values.data()), buffer.get(), n * sizeof(Complex));
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(plan);
}

}  // namespace

std::vector<Complex> ForwardFft(const Volume& volume) {
  std::vector<Complex> values(volume.data().begin(), volume.data().end());
  Transform(values, volume.grid().dims(), FFTW_FORWARD);
  return values;
}

std::vector<Complex> InverseFft(std::vector<Complex> spectrum,
                                const Index3& dims) {
  Transform(spectrum, dims, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (Complex& c : spectrum) c *= scale;
  return spectrum;
}

Volume RealPartClamped(const std::vector<Complex>& values, const Grid& grid) {
  std::vector<float> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i].real();
    // NaN compares false and falls through to 0.
    out[i] = v >= 1.0 ? 1.0f : (v > 0.0 ? static_cast<float>(v) : 0.0f);
  }
  return Volume(grid, std::move(out));
}

}  // namespace ulfsynth
