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

#ifndef ULFSYNTH_CURATION_MISREGISTRATION_H_
#define ULFSYNTH_CURATION_MISREGISTRATION_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

struct SubjectScore {
  std::string subject_id;
  std::optional<double> score;  // absent or non-finite: not scored
};

enum class FlagStatus { kOk, kSuspect, kUnscored };
std::string_view ToString(FlagStatus s);

struct SubjectFlag {
  std::string subject_id;
  std::optional<double> score;
  FlagStatus status = FlagStatus::kOk;
};

struct FlagResult {
  std::vector<SubjectFlag> subjects;  // input order
  // Scores strictly below the threshold are suspects. NaN when degenerate.
  double threshold = 0;
  bool manual = false;
  // All finite scores identical: no split exists and nothing is flagged.
  bool degenerate = false;
  std::optional<double> low_mean;
  std::optional<double> high_mean;

  int NumSuspects() const;
};

// Two-class split of the finite scores: every cut between consecutive
// distinct values is tried and the one with the smallest pooled within-class
// sum of squares wins (lowest cut on ties); the threshold is the midpoint of
// the cut. A manual threshold replaces the estimate for flagging; the class
// means then describe the split it induces. Throws ContractError for fewer
// than two finite scores.
FlagResult FlagMisregistration(const std::vector<SubjectScore>& scores,
                               std::optional<double> manual_threshold = std::nullopt);

nlohmann::json ToJson(const FlagResult& result);
// Throws ParseError on malformed input.
FlagResult FlagResultFromJson(const nlohmann::json& j);
FlagResult LoadFlagResult(const std::string& path);

// Right lateral ventricle and right caudate in the harmonized 8-class scheme.
std::vector<Label> DefaultSentinels();

struct SentinelScore {
  std::string subject_id;
  // Mean Dice over the sentinels present in the ground truth.
  std::optional<double> mean_dsc;
  std::vector<Label> used;
  std::vector<Label> missing;  // absent from the ground truth
};

// Throws ContractError when the grids differ.
SentinelScore ComputeSentinelScore(const std::string& subject_id, const LabelMap& pred,
                                   const LabelMap& gt, const std::vector<Label>& sentinels);

}  // namespace ulfsynth

#endif  // ULFSYNTH_CURATION_MISREGISTRATION_H_
