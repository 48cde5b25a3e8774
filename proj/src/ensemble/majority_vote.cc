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

#include "ulfsynth/ensemble/majority_vote.h"

#include "ulfsynth/util/errors.h"

namespace ulfsynth {

std::string_view ToString(TieBreak t) {
  return t == TieBreak::kFirstMember ? "first_member" : "lowest_label";
}

std::optional<TieBreak> ParseTieBreak(std::string_view text) {
  if (text == "first_member") return TieBreak::kFirstMember;
  if (text == "lowest_label") return TieBreak::kLowestLabel;
  return std::nullopt;
}

LabelMap MajorityVote(const std::vector<LabelMap>& maps, TieBreak tie_break) {
  if (maps.size() < 2) throw ContractError("majority vote needs at least 2 label maps");
  const Grid& grid = maps.front().grid();
  Vocabulary vocabulary;
  for (const LabelMap& m : maps) {
    if (!m.grid().SameGeometry(grid)) {
      throw ContractError("majority vote members are on different grids");
    }
    vocabulary.insert(m.vocabulary().begin(), m.vocabulary().end());
  }
  const size_t k = maps.size();
  std::vector<Label> votes(k);
  std::vector<int> counts(k);
  std::vector<Label> out(grid.num_voxels());
  for (int64_t o = 0; o < grid.num_voxels(); ++o) {
    for (size_t m = 0; m < k; ++m) votes[m] = maps[m][o];
    // counts[m]: how many members voted the same as member m.
    int best = 0;
    for (size_t m = 0; m < k; ++m) {
      int c = 0;
      for (size_t n = 0; n < k; ++n) c += votes[n] == votes[m];
      counts[m] = c;
      best = std::max(best, c);
    }
    Label winner = -1;
    for (size_t m = 0; m < k; ++m) {
      if (counts[m] != best) continue;
      if (tie_break == TieBreak::kFirstMember) {
        winner = votes[m];
        break;
      }
      if (winner < 0 || votes[m] < winner) winner = votes[m];
    }
    out[o] = winner;
  }
  return LabelMap(grid, std::move(out), std::move(vocabulary));
}

}  // namespace ulfsynth
