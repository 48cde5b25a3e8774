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

#include "ulfsynth/segmetrics/leaderboard.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "ulfsynth/util/csv.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Accumulator {
  double sum = 0;
  int64_t n = 0;
  void Add(double v) {
    sum += v;
    ++n;
  }
  std::optional<double> Mean() const {
    return n ? std::optional(sum / static_cast<double>(n)) : std::nullopt;
  }
};

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::vector<double> NormAvg(const std::vector<std::vector<std::optional<double>>>& matrix,
                            const std::vector<bool>& reverse) {
  if (matrix.empty()) throw ContractError("leaderboard has no submissions");
  const size_t cols = reverse.size();
  for (const auto& row : matrix) {
    if (row.size() != cols) throw ContractError("leaderboard rows differ in width");
  }
  std::vector<double> sums(matrix.size(), 0.0);
  std::vector<int> counts(matrix.size(), 0);
  for (size_t c = 0; c < cols; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto value = [&](size_t r) { return reverse[c] ? 1.0 - *matrix[r][c] : *matrix[r][c]; };
    for (size_t r = 0; r < matrix.size(); ++r) {
      if (!matrix[r][c]) continue;
      lo = std::min(lo, value(r));
      hi = std::max(hi, value(r));
    }
    for (size_t r = 0; r < matrix.size(); ++r) {
      if (!matrix[r][c]) continue;
      sums[r] += hi > lo ? (value(r) - lo) / (hi - lo) : 0.0;
      ++counts[r];
    }
  }
  std::vector<double> scores(matrix.size());
  for (size_t r = 0; r < matrix.size(); ++r) {
    scores[r] = counts[r] ? sums[r] / counts[r] : kNaN;
  }
  return scores;
}

Leaderboard BuildLeaderboard(
    const std::map<std::string, std::vector<MetricsReport>>& submissions,
    const LeaderboardOptions& options) {
  if (submissions.empty()) throw ContractError("leaderboard has no submissions");
  using Key = std::pair<Label, Metric>;

  std::map<Key, double> worst;
  if (options.missing == MissingPolicy::kWorstInColumn) {
    for (const auto& [name, reports] : submissions) {
      for (const MetricsReport& r : reports) {
        for (const LabelMetrics& lm : r.labels) {
          for (Metric m : kAllMetrics) {
            if (!lm[m].value) continue;
            const double v = *lm[m].value;
            auto [it, fresh] = worst.emplace(Key{lm.label, m}, v);
            if (!fresh) it->second = HigherIsBetter(m) ? std::min(it->second, v)
                                                       : std::max(it->second, v);
          }
        }
      }
    }
  }

  Leaderboard board;
  board.options = options;
  std::vector<std::map<Key, Accumulator>> per_label;
  for (const auto& [name, reports] : submissions) {
    LeaderboardRow row;
    row.submission = name;
    std::array<Accumulator, 5> pooled;
    std::map<Key, Accumulator> cells;
    for (const MetricsReport& r : reports) {
      for (const LabelMetrics& lm : r.labels) {
        for (Metric m : kAllMetrics) {
          const size_t mi = static_cast<size_t>(m);
          std::optional<double> v = lm[m].value;
          if (!v) {
            ++row.missing[mi];
            auto w = worst.find(Key{lm.label, m});
            if (w != worst.end()) v = w->second;
          }
          if (!v) {
            cells[Key{lm.label, m}];  // column exists, cell stays empty
            continue;
          }
          pooled[mi].Add(*v);
          cells[Key{lm.label, m}].Add(*v);
        }
      }
    }
    for (size_t mi = 0; mi < 5; ++mi) {
      row.means[mi] = pooled[mi].Mean();
      row.counts[mi] = pooled[mi].n;
    }
    board.rows.push_back(row);
    per_label.push_back(std::move(cells));
  }

  std::vector<std::vector<std::optional<double>>> matrix;
  std::vector<bool> reverse;
  if (options.normalization == NormalizationMode::kPooled) {
    for (Metric m : kAllMetrics) reverse.push_back(HigherIsBetter(m));
    for (const LeaderboardRow& row : board.rows) {
      matrix.emplace_back(row.means.begin(), row.means.end());
    }
  } else {
    std::vector<Key> keys;
    for (const auto& cells : per_label) {
      for (const auto& [key, acc] : cells) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const Key& k : keys) reverse.push_back(HigherIsBetter(k.second));
    for (const auto& cells : per_label) {
      std::vector<std::optional<double>> line;
      for (const Key& k : keys) {
        auto it = cells.find(k);
        line.push_back(it == cells.end() ? std::nullopt : it->second.Mean());
      }
      matrix.push_back(std::move(line));
    }
  }
  const std::vector<double> scores = NormAvg(matrix, reverse);
  for (size_t r = 0; r < board.rows.size(); ++r) board.rows[r].norm_avg = scores[r];
  std::stable_sort(board.rows.begin(), board.rows.end(),
                   [](const LeaderboardRow& a, const LeaderboardRow& b) {
                     const bool an = std::isnan(a.norm_avg), bn = std::isnan(b.norm_avg);
                     if (an != bn) return bn;
                     if (!an && a.norm_avg != b.norm_avg) return a.norm_avg < b.norm_avg;
                     return a.submission < b.submission;
                   });
  return board;
}

void WriteLeaderboardCsv(std::ostream& out, const Leaderboard& board) {
  csv::Row header{"rank", "submission"};
  for (Metric m : kAllMetrics) {
    const std::string name(MetricName(m));
    header.push_back(name + "_mean");
    header.push_back(name + "_n");
    header.push_back(name + "_missing");
  }
  header.insert(header.end(), {"norm_avg", "normalization", "missing_policy"});
  out << csv::FormatRow(header) << '\n';
  int rank = 0;
  for (const LeaderboardRow& row : board.rows) {
    csv::Row line{std::to_string(++rank), row.submission};
    for (size_t mi = 0; mi < 5; ++mi) {
      line.push_back(row.means[mi] ? FormatDouble(*row.means[mi]) : "");
      line.push_back(std::to_string(row.counts[mi]));
      line.push_back(std::to_string(row.missing[mi]));
    }
    line.push_back(FormatDouble(row.norm_avg));
    line.push_back(ToString(board.options.normalization));
    line.push_back(ToString(board.options.missing));
    out << csv::FormatRow(line) << '\n';
  }
}

std::string ToString(NormalizationMode mode) {
  return mode == NormalizationMode::kPooled ? "pooled" : "per-label";
}

std::string ToString(MissingPolicy policy) {
  return policy == MissingPolicy::kExclude ? "exclude" : "worst-in-column";
}

NormalizationMode ParseNormalizationMode(const std::string& text) {
  if (text == "pooled") return NormalizationMode::kPooled;
  if (text == "per-label") return NormalizationMode::kPerLabel;
  throw ConfigError("unknown normalization mode '" + text +
                    "' (expected pooled or per-label)");
}

MissingPolicy ParseMissingPolicy(const std::string& text) {
  if (text == "exclude") return MissingPolicy::kExclude;
  if (text == "worst-in-column") return MissingPolicy::kWorstInColumn;
  throw ConfigError("unknown missing policy '" + text +
                    "' (expected exclude or worst-in-column)");
}

}  // namespace ulfsynth
