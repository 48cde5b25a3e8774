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

#ifndef ULFSYNTH_QCSERVE_SERVICE_H_
#define ULFSYNTH_QCSERVE_SERVICE_H_

#include <array>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ulfsynth/curation/misregistration.h"
#include "ulfsynth/curation/qc_store.h"
#include "ulfsynth/labelharm/manifest.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth::qcserve {

enum class Overlay { kNone, kGt, kPrediction };

struct SliceRequest {
  std::string subject_id;
  int axis = 1;  // 0 sagittal, 1 coronal, 2 axial
  int64_t index = 0;
  Overlay overlay = Overlay::kNone;
  std::optional<std::array<double, 2>> window;
};

// Run of equal non-zero labels within one displayed row.
struct Segment {
  Label label;
  int start;
  int length;
};

struct Slice {
  int width = 0;
  int height = 0;
  std::array<double, 2> window{};
  std::vector<uint8_t> pixels;  // row 0 is the top of the display
  std::vector<std::vector<Segment>> rows;  // empty when no overlay
};

// Slice layout: axis 0 shows (j across, k up), axis 1 shows (i across,
// k up), axis 2 shows (i across, j up). Display row r is voxel row
// height - 1 - r.
Slice ExtractSlice(const Volume& image, const LabelMap* labels, int axis, int64_t index,
                   const std::array<double, 2>& window);

// Robust default window: 1st and 99th percentiles of all voxels.
std::array<double, 2> RobustWindow(const Volume& image);

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  Manifest manifest;
  std::string ratings_path;  // rating history, created when absent
  std::optional<std::string> flags_path;  // output of `qc flag`
  // Prediction label maps; "{subject_id}" is substituted.
  std::optional<std::string> prediction_pattern;
};

// HTTP-independent request handling. Thread-safe: volumes are loaded once
// per subject and shared, and rating writes go through the store's lock.
class QcService {
 public:
  explicit QcService(ServiceOptions options);

  Response ListSubjects() const;
  // Query values as received; validation errors map to 400.
  Response GetSlicePng(const std::string& subject_id,
                       const std::map<std::string, std::string>& query) const;
  Response GetSliceJson(const std::string& subject_id,
                        const std::map<std::string, std::string>& query) const;
  Response PostRating(const std::string& subject_id, const std::string& body);
  Response RatingsCsv() const;

  const QCStore& store() const { return store_; }

 private:
  struct SubjectData {
    Volume image;
    std::array<double, 2> robust_window;
    std::optional<LabelMap> gt;
    std::optional<LabelMap> prediction;
  };
  using Loaded = std::shared_ptr<const SubjectData>;

  const ManifestEntry* FindEntry(const std::string& subject_id) const;
  Loaded Load(const ManifestEntry& entry) const;
  std::string Resolve(const std::string& path) const;
  // Fills `slice` or returns an error response.
  std::optional<Response> BuildSlice(const std::string& subject_id,
                                     const std::map<std::string, std::string>& query,
                                     SliceRequest& request, Slice& slice) const;

  ServiceOptions options_;
  std::map<std::string, size_t> entry_index_;  // first manifest entry per subject
  std::map<std::string, SubjectFlag> flags_;
  QCStore store_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::string, std::shared_future<Loaded>> cache_;
};

Response ErrorResponse(int status, const std::string& message);

}  // namespace ulfsynth::qcserve

#endif  // ULFSYNTH_QCSERVE_SERVICE_H_
