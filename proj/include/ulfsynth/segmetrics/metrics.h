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

#ifndef ULFSYNTH_SEGMETRICS_METRICS_H_
#define ULFSYNTH_SEGMETRICS_METRICS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ulfsynth/labelharm/scheme.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

enum class Metric { kDsc = 0, kHd, kHd95, kAssd, kRve };
inline constexpr std::array<Metric, 5> kAllMetrics = {
    Metric::kDsc, Metric::kHd, Metric::kHd95, Metric::kAssd, Metric::kRve};

std::string_view MetricName(Metric metric);
// True for DSC, where larger is better.
inline bool HigherIsBetter(Metric metric) { return metric == Metric::kDsc; }

using Mask = std::vector<uint8_t>;

// Voxels equal to `label`.
Mask LabelMask(const LabelMap& labels, Label label);

// Mask voxels with a face neighbour outside the mask or outside the grid.
Mask SurfaceMask(const Mask& mask, const Index3& dims);

struct SurfaceDistanceSet {
  // Distance (mm) from each surface voxel of A (pred) to the surface of B.
  std::vector<double> d_ab;
  std::vector<double> d_ba;
};

// Throws ContractError on a grid mismatch.
double Dice(const LabelMap& pred, const LabelMap& gt, Label label);
double Dice(const Mask& a, const Mask& b);

// Throws EmptyStructureError naming "pred" or "gt" when a mask is empty.
SurfaceDistanceSet SurfaceDistances(const LabelMap& pred, const LabelMap& gt,
                                    Label label);
SurfaceDistanceSet SurfaceDistances(const Mask& a, const Mask& b,
                                    const Index3& dims, const Spacing3& spacing);

// Throw ContractError on empty sets.
double Hausdorff(const SurfaceDistanceSet& sd);
// Linear-interpolation 95th percentile of d_ab and d_ba pooled.
double Hd95(const SurfaceDistanceSet& sd);
double Assd(const SurfaceDistanceSet& sd);
// q in [0, 1]; position q * (n - 1) in the sorted values.
double Percentile(std::vector<double> values, double q);

// |V_pred - V_gt| / V_gt. Throws EmptyStructureError when gt is empty.
double Rve(const LabelMap& pred, const LabelMap& gt, Label label);

struct MetricValue {
  std::optional<double> value;
  // "gt-empty" or "pred-empty" when value is absent.
  std::string missing_reason;

  static MetricValue Of(double v) { return {v, ""}; }
  static MetricValue Missing(std::string reason) {
    return {std::nullopt, std::move(reason)};
  }
};

struct LabelMetrics {
  Label label;
  std::string name;
  std::array<MetricValue, 5> values;  // indexed by Metric

  const MetricValue& operator[](Metric m) const {
    return values[static_cast<size_t>(m)];
  }
};

struct MetricsReport {
  std::string subject_id;
  std::vector<LabelMetrics> labels;
};

// Per-class metrics for every class of `scheme` not excluded from
// evaluation. gt-empty classes get every metric missing; pred-empty classes
// get DSC 0, RVE 1 and missing distances.
MetricsReport Evaluate(const LabelMap& pred, const LabelMap& gt,
                       const std::vector<SchemeClass>& classes,
                       const std::string& subject_id = "");

// Columns subject_id,label,metric,value,status; status is "ok" or
// "missing:<reason>".
void WriteReportsCsv(std::ostream& out, const std::vector<MetricsReport>& reports);
// Inverse of WriteReportsCsv. Label names are not stored and come back empty.
std::vector<MetricsReport> ReadReportsCsv(std::istream& in);

}  // namespace ulfsynth

#endif  // ULFSYNTH_SEGMETRICS_METRICS_H_
