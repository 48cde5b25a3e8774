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

#include "ulfsynth/volgrid/image.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

Volume::Volume(Grid grid, std::vector<float> data)
    : grid_(std::move(grid)), data_(std::move(data)) {
  if (static_cast<int64_t>(data_.size()) != grid_.num_voxels()) {
    throw ContractError("volume data length " + std::to_string(data_.size()) +
                        " does not match grid (" +
                        std::to_string(grid_.num_voxels()) + " voxels)");
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw ContractError("volume contains NaN/Inf");
  }
}

Volume Volume::Filled(const Grid& grid, float value) {
  return Volume(grid, std::vector<float>(grid.num_voxels(), value));
}

float Volume::Min() const { return *std::min_element(data_.begin(), data_.end()); }
float Volume::Max() const { return *std::max_element(data_.begin(), data_.end()); }

LabelMap::LabelMap(Grid grid, std::vector<Label> data, Vocabulary vocabulary)
    : grid_(std::move(grid)),
      data_(std::move(data)),
      vocabulary_(std::move(vocabulary)) {
  if (static_cast<int64_t>(data_.size()) != grid_.num_voxels()) {
    throw ContractError("label data length " + std::to_string(data_.size()) +
                        " does not match grid (" +
                        std::to_string(grid_.num_voxels()) + " voxels)");
  }
  for (const auto& [id, name] : vocabulary_) {
    if (id <= 0) {
      throw ContractError("vocabulary ids must be positive, got " +
                          std::to_string(id));
    }
  }
  // Check against the vocabulary with a one-entry cache; label maps are
  // piecewise constant so this stays cheap.
  Label last_ok = 0;
  for (Label v : data_) {
    if (v == 0 || v == last_ok) continue;
    if (v < 0) throw ContractError("negative label " + std::to_string(v));
    if (!vocabulary_.contains(v)) {
      throw ContractError("label " + std::to_string(v) +
                          " is not in the vocabulary");
    }
    last_ok = v;
  }
}

LabelMap LabelMap::WithDerivedVocabulary(Grid grid, std::vector<Label> data) {
  Vocabulary vocabulary;
  Label last = 0;
  for (Label v : data) {
    if (v == last || v <= 0) continue;
    vocabulary.try_emplace(v, "label_" + std::to_string(v));
    last = v;
  }
  return LabelMap(std::move(grid), std::move(data), std::move(vocabulary));
}

std::set<Label> LabelMap::PresentLabels() const {
  std::set<Label> present;
  Label last = 0;
  for (Label v : data_) {
    if (v == 0 || v == last) continue;
    present.insert(v);
    last = v;
  }
  return present;
}

int64_t LabelMap::Count(Label label) const {
  return std::count(data_.begin(), data_.end(), label);
}

}  // namespace ulfsynth
