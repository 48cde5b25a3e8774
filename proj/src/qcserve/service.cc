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

#include "ulfsynth/qcserve/service.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>

#include "ulfsynth/qcserve/png.h"
#include "ulfsynth/segmetrics/metrics.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/util/time.h"
#include "ulfsynth/volgrid/nifti.h"

namespace ulfsynth::qcserve {

using nlohmann::json;

namespace {

constexpr std::string_view kSubjectToken = "{subject_id}";

std::optional<int64_t> ParseInt(const std::string& s) {
  int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> ParseDouble(const std::string& s) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

json RecordJson(const QCRecord& r) {
  return {{"subject_id", r.subject_id},
          {"rating", std::string(ToString(r.rating))},
          {"affected_structures", r.affected_structures},
          {"rater", r.rater},
          {"timestamp", FormatIsoUtc(r.timestamp)},
          {"note", r.note}};
}

// (across, up) voxel axes shown for a slicing axis.
std::array<int, 2> InPlaneAxes(int axis) {
  switch (axis) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

}  // namespace

Response ErrorResponse(int status, const std::string& message) {
  return {status, "application/json", json{{"error", message}}.dump()};
}

std::array<double, 2> RobustWindow(const Volume& image) {
  std::vector<double> v(image.data().begin(), image.data().end());
  return {Percentile(v, 0.01), Percentile(v, 0.99)};
}

Slice ExtractSlice(const Volume& image, const LabelMap* labels, int axis, int64_t index,
                   const std::array<double, 2>& window) {
  const Index3& d = image.grid().dims();
  if (axis < 0 || axis > 2) throw ContractError("axis must be 0, 1 or 2");
  if (index < 0 || index >= d[axis]) throw ContractError("slice index out of range");
  const auto [ax, ay] = InPlaneAxes(axis);
  Slice s;
  s.width = static_cast<int>(d[ax]);
  s.height = static_cast<int>(d[ay]);
  s.window = window;
  s.pixels.resize(static_cast<size_t>(s.width) * s.height);
  if (labels != nullptr) s.rows.resize(s.height);
  const double lo = window[0], span = window[1] - window[0];
  for (int r = 0; r < s.height; ++r) {
    Index3 p{};
    p[axis] = index;
    p[ay] = s.height - 1 - r;
    for (int c = 0; c < s.width; ++c) {
      p[ax] = c;
      const int64_t off = image.grid().Offset(p[0], p[1], p[2]);
      const double t = span > 0 ? (image[off] - lo) / span : (image[off] > lo ? 1.0 : 0.0);
      s.pixels[static_cast<size_t>(r) * s.width + c] =
          static_cast<uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
      if (labels == nullptr) continue;
      const Label l = (*labels)[off];
      std::vector<Segment>& row = s.rows[r];
      if (l == 0) continue;
      if (!row.empty() && row.back().label == l && row.back().start + row.back().length == c) {
        ++row.back().length;
      } else {
        row.push_back({l, c, 1});
      }
    }
  }
  return s;
}

QcService::QcService(ServiceOptions options)
    : options_(std::move(options)), store_(QCStore::Open(options_.ratings_path)) {
  for (size_t i = 0; i < options_.manifest.entries.size(); ++i) {
    entry_index_.try_emplace(options_.manifest.entries[i].subject_id, i);
  }
  if (options_.flags_path) {
    for (const SubjectFlag& f : LoadFlagResult(*options_.flags_path).subjects) {
      flags_[f.subject_id] = f;
    }
  }
}

const ManifestEntry* QcService::FindEntry(const std::string& subject_id) const {
  auto it = entry_index_.find(subject_id);
  return it == entry_index_.end() ? nullptr : &options_.manifest.entries[it->second];
}

std::string QcService::Resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute() || options_.manifest.base_dir.empty()) return path;
  return (std::filesystem::path(options_.manifest.base_dir) / p).string();
}

QcService::Loaded QcService::Load(const ManifestEntry& entry) const {
  std::promise<Loaded> promise;
  std::shared_future<Loaded> future;
  bool loader = false;
  {
    std::lock_guard lock(cache_mu_);
    auto it = cache_.find(entry.subject_id);
    if (it == cache_.end()) {
      future = promise.get_future().share();
      cache_.emplace(entry.subject_id, future);
      loader = true;
    } else {
      future = it->second;
    }
  }
  if (loader) {
    // Loading happens outside the cache lock; other subjects proceed.
    try {
      Volume image = nifti::ReadVolume(Resolve(entry.image_path));
      const auto window = RobustWindow(image);
      auto data = std::make_shared<SubjectData>(
          SubjectData{std::move(image), window, std::nullopt, std::nullopt});
      const std::string gt_path = Resolve(entry.label_path);
      if (std::filesystem::exists(gt_path)) data->gt = nifti::ReadLabelMap(gt_path);
      if (options_.prediction_pattern) {
        std::string p = *options_.prediction_pattern;
        for (size_t at = p.find(kSubjectToken); at != std::string::npos;
             at = p.find(kSubjectToken, at + entry.subject_id.size())) {
          p.replace(at, kSubjectToken.size(), entry.subject_id);
        }
        if (std::filesystem::exists(p)) data->prediction = nifti::ReadLabelMap(p);
      }
      promise.set_value(std::move(data));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(cache_mu_);
      cache_.erase(entry.subject_id);
    }
  }
  return future.get();
}

Response QcService::ListSubjects() const {
  const auto latest = store_.Latest();
  json out = json::array();
  for (const auto& [subject, index] : entry_index_) {
    const ManifestEntry& e = options_.manifest.entries[index];
    json item = {{"subject_id", subject}};
    try {
      const Index3 d = nifti::ReadHeader(Resolve(e.image_path)).grid.dims();
      item["dims"] = {d[0], d[1], d[2]};
    } catch (const Error&) {
      item["dims"] = nullptr;
    }
    QcStatus status = e.qc_status;
    if (auto it = latest.find(subject); it != latest.end() && it->second.rating != QcStatus::kUnrated) {
      status = it->second.rating;
    }
    item["qc_status"] = std::string(ToString(status));
    if (auto it = flags_.find(subject); it != flags_.end()) {
      item["sentinel_score"] = it->second.score ? json(*it->second.score) : json(nullptr);
      item["flag"] = std::string(ToString(it->second.status));
    }
    out.push_back(item);
  }
  return {200, "application/json", out.dump()};
}

std::optional<Response> QcService::BuildSlice(const std::string& subject_id,
                                              const std::map<std::string, std::string>& query,
                                              SliceRequest& req, Slice& slice) const {
  const ManifestEntry* entry = FindEntry(subject_id);
  if (entry == nullptr) return ErrorResponse(404, "unknown subject '" + subject_id + "'");
  req.subject_id = subject_id;
  std::optional<int64_t> index;
  for (const auto& [key, value] : query) {
    if (key == "axis") {
      const auto a = ParseInt(value);
      if (!a || *a < 0 || *a > 2) return ErrorResponse(400, "axis must be 0, 1 or 2");
      req.axis = static_cast<int>(*a);
    } else if (key == "index") {
      index = ParseInt(value);
      if (!index) return ErrorResponse(400, "index must be an integer");
    } else if (key == "overlay") {
      if (value == "none") {
        req.overlay = Overlay::kNone;
      } else if (value == "gt") {
        req.overlay = Overlay::kGt;
      } else if (value == "prediction") {
        req.overlay = Overlay::kPrediction;
      } else {
        return ErrorResponse(400, "overlay must be none, gt or prediction");
      }
    } else if (key == "window") {
      const size_t comma = value.find(',');
      const auto lo = comma == std::string::npos ? std::nullopt : ParseDouble(value.substr(0, comma));
      const auto hi = comma == std::string::npos ? std::nullopt : ParseDouble(value.substr(comma + 1));
      if (!lo || !hi || !(*lo < *hi)) return ErrorResponse(400, "window must be 'min,max' with min < max");
      req.window = std::array<double, 2>{*lo, *hi};
    } else {
      return ErrorResponse(400, "unknown query parameter '" + key + "'");
    }
  }
  Loaded data;
  try {
    data = Load(*entry);
  } catch (const std::exception& e) {
    return ErrorResponse(500, "cannot load subject '" + subject_id + "': " + e.what());
  }
  const Index3& d = data->image.grid().dims();
  req.index = index.value_or(d[req.axis] / 2);
  if (req.index < 0 || req.index >= d[req.axis]) {
    return ErrorResponse(400, "index " + std::to_string(req.index) + " outside [0, " +
                                  std::to_string(d[req.axis]) + ") for axis " +
                                  std::to_string(req.axis));
  }
  const LabelMap* labels = nullptr;
  if (req.overlay == Overlay::kGt) {
    if (!data->gt) return ErrorResponse(404, "no ground-truth labels for '" + subject_id + "'");
    labels = &*data->gt;
  } else if (req.overlay == Overlay::kPrediction) {
    if (!data->prediction) return ErrorResponse(404, "no prediction for '" + subject_id + "'");
    labels = &*data->prediction;
  }
  if (labels != nullptr && labels->grid().dims() != d) {
    return ErrorResponse(500, "label map and image of '" + subject_id + "' have different dims");
  }
  slice = ExtractSlice(data->image, labels, req.axis, req.index,
                       req.window.value_or(data->robust_window));
  return std::nullopt;
}

Response QcService::GetSlicePng(const std::string& subject_id,
                                const std::map<std::string, std::string>& query) const {
  SliceRequest req;
  Slice slice;
  if (auto err = BuildSlice(subject_id, query, req, slice)) return *err;
  return {200, "image/png", png::EncodeGray8(slice.width, slice.height, slice.pixels)};
}

Response QcService::GetSliceJson(const std::string& subject_id,
                                 const std::map<std::string, std::string>& query) const {
  SliceRequest req;
  Slice slice;
  if (auto err = BuildSlice(subject_id, query, req, slice)) return *err;
  static constexpr const char* kOverlayNames[] = {"none", "gt", "prediction"};
  json rows = json::array();
  for (size_t r = 0; r < slice.rows.size(); ++r) {
    if (slice.rows[r].empty()) continue;
    json segs = json::array();
    for (const Segment& s : slice.rows[r]) {
      segs.push_back({{"label", s.label}, {"start", s.start}, {"length", s.length}});
    }
    rows.push_back({{"row", r}, {"segments", segs}});
  }
  const json out = {{"subject_id", subject_id},
                    {"axis", req.axis},
                    {"index", req.index},
                    {"width", slice.width},
                    {"height", slice.height},
                    {"window", {slice.window[0], slice.window[1]}},
                    {"overlay", kOverlayNames[static_cast<int>(req.overlay)]},
                    {"rows", rows}};
  return {200, "application/json", out.dump()};
}

Response QcService::PostRating(const std::string& subject_id, const std::string& body) {
  if (FindEntry(subject_id) == nullptr) {
    return ErrorResponse(404, "unknown subject '" + subject_id + "'");
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return ErrorResponse(400, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) return ErrorResponse(400, "body must be a JSON object");
  QCRecord rec;
  rec.subject_id = subject_id;
  if (!j.contains("rating") || !j["rating"].is_string() ||
      !ParseQcStatus(j["rating"].get<std::string>())) {
    return ErrorResponse(422, "rating must be one of good, bad, unrated");
  }
  rec.rating = *ParseQcStatus(j["rating"].get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "rating") continue;
    if (key == "affected_structures") {
      if (!value.is_array()) return ErrorResponse(422, "affected_structures must be a list");
      for (const json& s : value) {
        if (!s.is_string()) return ErrorResponse(422, "affected_structures must hold strings");
        rec.affected_structures.push_back(s.get<std::string>());
      }
    } else if (key == "rater" || key == "note") {
      if (!value.is_string()) return ErrorResponse(422, key + " must be a string");
      (key == "rater" ? rec.rater : rec.note) = value.get<std::string>();
    } else {
      return ErrorResponse(422, "unknown field '" + key + "'");
    }
  }
  try {
    return {200, "application/json", RecordJson(store_.AppendNow(rec)).dump()};
  } catch (const ValidationError& e) {
    return ErrorResponse(422, e.what());
  } catch (const IoError& e) {
    return ErrorResponse(500, e.what());
  }
}

Response QcService::RatingsCsv() const { return {200, "text/csv", ExportCsv(store_)}; }

}  // namespace ulfsynth::qcserve
