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

#include "ulfsynth/curation/misregistration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ulfsynth/segmetrics/metrics.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth {

using nlohmann::json;

std::string_view ToString(FlagStatus s) {
  switch (s) {
    case FlagStatus::kOk: return "ok";
    case FlagStatus::kSuspect: return "suspect";
    case FlagStatus::kUnscored: return "unscored";
  }
  return "ok";
}

int FlagResult::NumSuspects() const {
  return static_cast<int>(std::count_if(subjects.begin(), subjects.end(), [](const SubjectFlag& f) {
    return f.status == FlagStatus::kSuspect;
  }));
}

namespace {

bool Finite(const std::optional<double>& s) { return s && std::isfinite(*s); }

double Mean(const std::vector<double>& v, size_t begin, size_t end) {
  double s = 0;
  for (size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

}  // namespace

FlagResult FlagMisregistration(const std::vector<SubjectScore>& scores,
                               std::optional<double> manual_threshold) {
  std::vector<double> v;
  for (const SubjectScore& s : scores) {
    if (Finite(s.score)) v.push_back(*s.score);
  }
  if (v.size() < 2) throw ContractError("misregistration flagging needs at least 2 finite scores");
  if (manual_threshold && !std::isfinite(*manual_threshold)) {
    throw ContractError("manual threshold must be finite");
  }
  std::sort(v.begin(), v.end());
  const size_t n = v.size();

  // Prefix sums give each split's within-class sum of squares in O(1).
  std::vector<double> s1(n + 1, 0), s2(n + 1, 0);
  for (size_t i = 0; i < n; ++i) {
    s1[i + 1] = s1[i] + v[i];
    s2[i + 1] = s2[i] + v[i] * v[i];
  }
  const auto sse = [&](size_t b, size_t e) {
    const double m = static_cast<double>(e - b);
    const double sum = s1[e] - s1[b];
    return std::max(0.0, (s2[e] - s2[b]) - sum * sum / m);
  };

  FlagResult result;
  result.manual = manual_threshold.has_value();
  size_t best_cut = 0;  // size of the low class
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < n; ++k) {
    if (v[k] == v[k - 1]) continue;
    const double w = sse(0, k) + sse(k, n);
    if (w < best) {
      best = w;
      best_cut = k;
    }
  }
  if (manual_threshold) {
    result.threshold = *manual_threshold;
    const size_t k = std::lower_bound(v.begin(), v.end(), *manual_threshold) - v.begin();
    if (k > 0) result.low_mean = Mean(v, 0, k);
    if (k < n) result.high_mean = Mean(v, k, n);
  } else if (best_cut == 0) {
    result.degenerate = true;
    result.threshold = std::numeric_limits<double>::quiet_NaN();
  } else {
    result.threshold = 0.5 * (v[best_cut - 1] + v[best_cut]);
    result.low_mean = Mean(v, 0, best_cut);
    result.high_mean = Mean(v, best_cut, n);
  }

  for (const SubjectScore& s : scores) {
    SubjectFlag f{s.subject_id, Finite(s.score) ? s.score : std::nullopt, FlagStatus::kOk};
    if (!f.score) {
      f.status = FlagStatus::kUnscored;
    } else if (!result.degenerate && *f.score < result.threshold) {
      f.status = FlagStatus::kSuspect;
    }
    result.subjects.push_back(f);
  }
  return result;
}

json ToJson(const FlagResult& r) {
  const auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json subjects = json::array();
  for (const SubjectFlag& f : r.subjects) {
    subjects.push_back({{"subject_id", f.subject_id},
                        {"score", opt(f.score)},
                        {"status", std::string(ToString(f.status))}});
  }
  return {{"threshold", r.degenerate ? json(nullptr) : json(r.threshold)},
          {"manual", r.manual},
          {"degenerate", r.degenerate},
          {"low_mean", opt(r.low_mean)},
          {"high_mean", opt(r.high_mean)},
          {"num_suspects", r.NumSuspects()},
          {"subjects", subjects}};
}

FlagResult FlagResultFromJson(const json& j) {
  const auto opt = [](const json& x) -> std::optional<double> {
    if (x.is_null()) return std::nullopt;
    return x.get<double>();
  };
  try {
    FlagResult r;
    r.manual = j.at("manual").get<bool>();
    r.degenerate = j.at("degenerate").get<bool>();
    r.threshold = j.at("threshold").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : j.at("threshold").get<double>();
    r.low_mean = opt(j.at("low_mean"));
    r.high_mean = opt(j.at("high_mean"));
    for (const json& s : j.at("subjects")) {
      SubjectFlag f{s.at("subject_id").get<std::string>(), opt(s.at("score")), FlagStatus::kOk};
      const std::string status = s.at("status").get<std::string>();
      if (status == "suspect") {
        f.status = FlagStatus::kSuspect;
      } else if (status == "unscored") {
        f.status = FlagStatus::kUnscored;
      } else if (status != "ok") {
        throw ParseError("flag results: unknown status '" + status + "'");
      }
      r.subjects.push_back(f);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("flag results: ") + e.what());
  }
}

FlagResult LoadFlagResult(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return FlagResultFromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Label> DefaultSentinels() { return {4, 6}; }

SentinelScore ComputeSentinelScore(const std::string& subject_id, const LabelMap& pred,
                                   const LabelMap& gt, const std::vector<Label>& sentinels) {
  if (!pred.grid().SameGeometry(gt.grid())) {
    throw ContractError("subject " + subject_id + ": prediction and ground truth grids differ");
  }
  SentinelScore out{subject_id, std::nullopt, {}, {}};
  double sum = 0;
  for (Label l : sentinels) {
    if (gt.Count(l) == 0) {
      out.missing.push_back(l);
      continue;
    }
    sum += Dice(pred, gt, l);
    out.used.push_back(l);
  }
  if (!out.used.empty()) out.mean_dsc = sum / static_cast<double>(out.used.size());
  return out;
}

}  // namespace ulfsynth
