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

#ifndef ULFSYNTH_SEGMETRICS_LEADERBOARD_H_
#define ULFSYNTH_SEGMETRICS_LEADERBOARD_H_

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ulfsynth/segmetrics/metrics.h"

namespace ulfsynth {

enum class NormalizationMode {
  // One column per metric: mean over subjects and labels, then normalize.
  kPooled,
  // One column per (label, metric): mean over subjects, normalize, then the
  // score averages every column.
  kPerLabel,
};

enum class MissingPolicy {
  // Drop missing values from the means; counts are reported.
  kExclude,
  // Replace a missing value by the worst value seen for the same label and
  // metric across all submissions.
  kWorstInColumn,
};

struct LeaderboardOptions {
  NormalizationMode normalization = NormalizationMode::kPooled;
  MissingPolicy missing = MissingPolicy::kExclude;
};

struct LeaderboardRow {
  std::string submission;
  // Mean per metric over subjects and labels (raw scale, DSC not reversed).
  std::array<std::optional<double>, 5> means;
  std::array<int64_t, 5> counts{};
  std::array<int64_t, 5> missing{};
  double norm_avg = 0.0;
};

struct Leaderboard {
  LeaderboardOptions options;
  std::vector<LeaderboardRow> rows;  // sorted by norm_avg, then name
};

// Normalized average of a submissions x columns matrix. Entries of columns
// listed in `reverse` are mapped to 1 - x first. Each column is scaled to
// [0, 1] between its min and max (constant columns become 0) and each row is
// averaged over its present entries. Throws ContractError when empty.
std::vector<double> NormAvg(const std::vector<std::vector<std::optional<double>>>& matrix,
                            const std::vector<bool>& reverse);

Leaderboard BuildLeaderboard(
    const std::map<std::string, std::vector<MetricsReport>>& submissions,
    const LeaderboardOptions& options = {});

// Columns: rank, submission, then <metric>_mean, <metric>_n and
// <metric>_missing per metric, norm_avg, normalization, missing_policy.
void WriteLeaderboardCsv(std::ostream& out, const Leaderboard& board);

std::string ToString(NormalizationMode mode);
std::string ToString(MissingPolicy policy);
// Throw ConfigError on unknown names.
NormalizationMode ParseNormalizationMode(const std::string& text);
MissingPolicy ParseMissingPolicy(const std::string& text);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SEGMETRICS_LEADERBOARD_H_
