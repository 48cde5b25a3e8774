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

#ifndef ULFSYNTH_ENSEMBLE_MAJORITY_VOTE_H_
#define ULFSYNTH_ENSEMBLE_MAJORITY_VOTE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

enum class TieBreak {
  // Among tied labels, the one voted by the earliest member.
  kFirstMember,
  // Smallest tied label id; background (0) takes part.
  kLowestLabel,
};

std::string_view ToString(TieBreak t);
std::optional<TieBreak> ParseTieBreak(std::string_view text);

// Voxel-wise plurality vote; background counts as a vote. The output
// vocabulary is the union of the members' (earlier members name a label
// first). Throws ContractError for fewer than 2 maps or differing grids.
LabelMap MajorityVote(const std::vector<LabelMap>& maps,
                      TieBreak tie_break = TieBreak::kFirstMember);

}  // namespace ulfsynth

#endif  // ULFSYNTH_ENSEMBLE_MAJORITY_VOTE_H_
