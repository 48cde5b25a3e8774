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

#ifndef ULFSYNTH_VOLGRID_IMAGE_H_
#define ULFSYNTH_VOLGRID_IMAGE_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ulfsynth/volgrid/grid.h"

namespace ulfsynth {

using Label = int32_t;
// Label id -> structure name. Background (0) is implicit and never listed.
using Vocabulary = std::map<Label, std::string>;

// Scalar intensity image. Immutable once built; every value is finite.
class Volume {
 public:
  // Throws ContractError if data.size() != grid.num_voxels() or a value is
  // NaN/Inf.
  Volume(Grid grid, std::vector<float> data);
  static Volume Filled(const Grid& grid, float value);

  const Grid& grid() const { return grid_; }
  std::span<const float> data() const { return data_; }
  float operator[](int64_t offset) const { return data_[offset]; }
  float at(int64_t i, int64_t j, int64_t k) const {
    return data_[grid_.Offset(i, j, k)];
  }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  float Min() const;
  float Max() const;

 private:
  Grid grid_;
  std::vector<float> data_;
};

// Integer annotation map on a grid.
class LabelMap {
 public:
  // Throws ContractError when the size is wrong, a voxel is negative, or a
  // non-zero voxel value is missing from `vocabulary`.
  LabelMap(Grid grid, std::vector<Label> data, Vocabulary vocabulary);
  // Vocabulary built from the labels present, named "label_<id>".
  static LabelMap WithDerivedVocabulary(Grid grid, std::vector<Label> data);

  const Grid& grid() const { return grid_; }
  std::span<const Label> data() const { return data_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  Label operator[](int64_t offset) const { return data_[offset]; }
  Label at(int64_t i, int64_t j, int64_t k) const {
    return data_[grid_.Offset(i, j, k)];
  }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  // Distinct non-zero labels that occur at least once.
  std::set<Label> PresentLabels() const;
  int64_t Count(Label label) const;

 private:
  Grid grid_;
  std::vector<Label> data_;
  Vocabulary vocabulary_;
};

}  // namespace ulfsynth

#endif  // ULFSYNTH_VOLGRID_IMAGE_H_
