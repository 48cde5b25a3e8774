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

#include "ulfsynth/segmetrics/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>

#include "ulfsynth/segmetrics/distance_transform.h"
#include "ulfsynth/util/csv.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth {

namespace {

void CheckSameGrid(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.grid().SameGeometry(gt.grid())) {
    throw ContractError("prediction and ground truth are on different grids");
  }
}

int64_t CountOf(const Mask& m) { return std::count(m.begin(), m.end(), 1); }

std::vector<double> DistancesFrom(const Mask& from_surface,
                                  const std::vector<double>& squared_edt) {
  std::vector<double> out;
  for (size_t o = 0; o < from_surface.size(); ++o) {
    if (from_surface[o]) out.push_back(std::sqrt(squared_edt[o]));
  }
  return out;
}

void RequireNonEmpty(const SurfaceDistanceSet& sd) {
  if (sd.d_ab.empty() || sd.d_ba.empty()) {
    throw ContractError("surface distance set is empty");
  }
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kDsc: return "DSC";
    case Metric::kHd: return "HD";
    case Metric::kHd95: return "HD95";
    case Metric::kAssd: return "ASSD";
    case Metric::kRve: return "RVE";
  }
  return "?";
}

Mask LabelMask(const LabelMap& labels, Label label) {
  Mask m(labels.size());
  for (int64_t o = 0; o < labels.size(); ++o) m[o] = labels[o] == label;
  return m;
}

Mask SurfaceMask(const Mask& mask, const Index3& dims) {
  Mask s(mask.size(), 0);
  const int64_t nx = dims[0], ny = dims[1], nz = dims[2];
  auto inside = [&](int64_t i, int64_t j, int64_t k) {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz &&
           mask[i + nx * (j + ny * k)];
  };
  for (int64_t k = 0; k < nz; ++k) {
    for (int64_t j = 0; j < ny; ++j) {
      for (int64_t i = 0; i < nx; ++i) {
        const int64_t o = i + nx * (j + ny * k);
        if (!mask[o]) continue;
        s[o] = !inside(i - 1, j, k) || !inside(i + 1, j, k) || !inside(i, j - 1, k) ||
               !inside(i, j + 1, k) || !inside(i, j, k - 1) || !inside(i, j, k + 1);
      }
    }
  }
  return s;
}

double Dice(const Mask& a, const Mask& b) {
  if (a.size() != b.size()) throw ContractError("masks differ in size");
  int64_t na = 0, nb = 0, both = 0;
  for (size_t o = 0; o < a.size(); ++o) {
    na += a[o];
    nb += b[o];
    both += a[o] & b[o];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double Dice(const LabelMap& pred, const LabelMap& gt, Label label) {
  CheckSameGrid(pred, gt);
  return Dice(LabelMask(pred, label), LabelMask(gt, label));
}

SurfaceDistanceSet SurfaceDistances(const Mask& a, const Mask& b,
                                    const Index3& dims, const Spacing3& spacing) {
  if (CountOf(a) == 0) throw EmptyStructureError("prediction structure is empty", "pred");
  if (CountOf(b) == 0) throw EmptyStructureError("ground-truth structure is empty", "gt");
  const Mask sa = SurfaceMask(a, dims);
  const Mask sb = SurfaceMask(b, dims);
  SurfaceDistanceSet sd;
  sd.d_ab = DistancesFrom(sa, SquaredDistanceTransform(sb, dims, spacing));
  sd.d_ba = DistancesFrom(sb, SquaredDistanceTransform(sa, dims, spacing));
  return sd;
}

SurfaceDistanceSet SurfaceDistances(const LabelMap& pred, const LabelMap& gt,
                                    Label label) {
  CheckSameGrid(pred, gt);
  return SurfaceDistances(LabelMask(pred, label), LabelMask(gt, label),
                          gt.grid().dims(), gt.grid().spacing());
}

double Hausdorff(const SurfaceDistanceSet& sd) {
  RequireNonEmpty(sd);
  return std::max(*std::max_element(sd.d_ab.begin(), sd.d_ab.end()),
                  *std::max_element(sd.d_ba.begin(), sd.d_ba.end()));
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double Hd95(const SurfaceDistanceSet& sd) {
  RequireNonEmpty(sd);
  std::vector<double> pooled = sd.d_ab;
  pooled.insert(pooled.end(), sd.d_ba.begin(), sd.d_ba.end());
  return Percentile(std::move(pooled), 0.95);
}

double Assd(const SurfaceDistanceSet& sd) {
  RequireNonEmpty(sd);
  double sum = 0;
  for (double d : sd.d_ab) sum += d;
  for (double d : sd.d_ba) sum += d;
  return sum / static_cast<double>(sd.d_ab.size() + sd.d_ba.size());
}

double Rve(const LabelMap& pred, const LabelMap& gt, Label label) {
  CheckSameGrid(pred, gt);
  const double vp = static_cast<double>(pred.Count(label)) * pred.grid().voxel_volume();
  const double vg = static_cast<double>(gt.Count(label)) * gt.grid().voxel_volume();
  if (vg == 0) throw EmptyStructureError("ground-truth structure is empty", "gt");
  return std::abs(vp - vg) / vg;
}

MetricsReport Evaluate(const LabelMap& pred, const LabelMap& gt,
                       const std::vector<SchemeClass>& classes,
                       const std::string& subject_id) {
  CheckSameGrid(pred, gt);
  MetricsReport report;
  report.subject_id = subject_id;
  const Index3& dims = gt.grid().dims();
  const Spacing3& spacing = gt.grid().spacing();
  for (const SchemeClass& c : classes) {
    if (c.excluded_from_eval) continue;
    LabelMetrics lm{c.id, c.name, {}};
    auto set = [&](Metric m, MetricValue v) { lm.values[static_cast<size_t>(m)] = v; };
    const Mask p = LabelMask(pred, c.id);
    const Mask g = LabelMask(gt, c.id);
    const int64_t np = CountOf(p), ng = CountOf(g);
    if (ng == 0) {
      for (Metric m : kAllMetrics) set(m, MetricValue::Missing("gt-empty"));
    } else {
      set(Metric::kDsc, MetricValue::Of(Dice(p, g)));
      set(Metric::kRve, MetricValue::Of(std::abs(static_cast<double>(np - ng)) /
                                        static_cast<double>(ng)));
      if (np == 0) {
        for (Metric m : {Metric::kHd, Metric::kHd95, Metric::kAssd}) {
          set(m, MetricValue::Missing("pred-empty"));
        }
      } else {
        const SurfaceDistanceSet sd = SurfaceDistances(p, g, dims, spacing);
        set(Metric::kHd, MetricValue::Of(Hausdorff(sd)));
        set(Metric::kHd95, MetricValue::Of(Hd95(sd)));
        set(Metric::kAssd, MetricValue::Of(Assd(sd)));
      }
    }
    report.labels.push_back(std::move(lm));
  }
  return report;
}

void WriteReportsCsv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << "subject_id,label,metric,value,status\n";
  for (const MetricsReport& r : reports) {
    for (const LabelMetrics& lm : r.labels) {
      for (Metric m : kAllMetrics) {
        const MetricValue& v = lm[m];
        out << csv::FormatRow({r.subject_id, std::to_string(lm.label),
                               std::string(MetricName(m)),
                               v.value ? FormatDouble(*v.value) : "",
                               v.value ? "ok" : "missing:" + v.missing_reason})
            << '\n';
      }
    }
  }
}

std::vector<MetricsReport> ReadReportsCsv(std::istream& in) {
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.Next(row) ||
      row != csv::Row{"subject_id", "label", "metric", "value", "status"}) {
    throw ParseError("metrics CSV: header must be subject_id,label,metric,value,status");
  }
  std::map<std::string, Metric> by_name;
  for (Metric m : kAllMetrics) by_name[std::string(MetricName(m))] = m;
  std::vector<MetricsReport> reports;
  while (reader.Next(row)) {
    const std::string where = "metrics CSV line " + std::to_string(reader.line());
    if (row.size() != 5) throw ParseError(where + ": expected 5 fields");
    auto metric = by_name.find(row[2]);
    if (metric == by_name.end()) throw ParseError(where + ": unknown metric " + row[2]);
    Label label;
    try {
      label = std::stoi(row[1]);
    } catch (const std::exception&) {
      throw ParseError(where + ": bad label '" + row[1] + "'");
    }
    MetricValue v;
    if (row[4] == "ok") {
      double x = 0;
      auto [ptr, ec] = std::from_chars(row[3].data(), row[3].data() + row[3].size(), x);
      if (ec != std::errc() || ptr != row[3].data() + row[3].size()) {
        throw ParseError(where + ": bad value '" + row[3] + "'");
      }
      v = MetricValue::Of(x);
    } else if (row[4].rfind("missing:", 0) == 0) {
      v = MetricValue::Missing(row[4].substr(8));
    } else {
      throw ParseError(where + ": bad status '" + row[4] + "'");
    }
    if (reports.empty() || reports.back().subject_id != row[0]) {
      reports.push_back({row[0], {}});
    }
    auto& labels = reports.back().labels;
    if (labels.empty() || labels.back().label != label) labels.push_back({label, "", {}});
    labels.back().values[static_cast<size_t>(metric->second)] = v;
  }
  return reports;
}

}  // namespace ulfsynth
