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

#ifndef ULFSYNTH_LABELHARM_MANIFEST_H_
#define ULFSYNTH_LABELHARM_MANIFEST_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ulfsynth {

// GT_HF: labels drawn on high-field scans and propagated by registration.
// GT_LF: labels drawn directly on the low-field scans.
enum class GtVariant { kHighField, kLowField };
enum class QcStatus { kGood, kBad, kUnrated };
enum class Split { kTrain, kVal };

std::string_view ToString(GtVariant v);
std::string_view ToString(QcStatus s);
std::string_view ToString(Split s);
std::optional<GtVariant> ParseGtVariant(std::string_view text);
std::optional<QcStatus> ParseQcStatus(std::string_view text);
std::optional<Split> ParseSplit(std::string_view text);

struct ManifestEntry {
  std::string subject_id;
  std::string image_path;
  std::string label_path;
  GtVariant gt_variant = GtVariant::kHighField;
  QcStatus qc_status = QcStatus::kUnrated;
  Split split = Split::kTrain;
  // Fields this version does not know about; written back unchanged.
  nlohmann::json extra = nlohmann::json::object();
};

struct Manifest {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::vector<ManifestEntry> entries;
  nlohmann::json extra = nlohmann::json::object();
  // Directory relative entry paths are resolved against. Not serialized.
  std::string base_dir;

  // Resolves a path stored in an entry against base_dir.
  std::string Resolve(const std::string& path) const;
  // Throws ValidationError on empty paths/ids or a repeated
  // (subject_id, gt_variant) pair.
  void Validate() const;
};

Manifest ManifestFromJson(const nlohmann::json& json);
nlohmann::json ManifestToJson(const Manifest& manifest);

// Throws IoError, ParseError (with line/column or entry/field) or
// ValidationError.
Manifest LoadManifest(const std::string& path);
void SaveManifest(const Manifest& manifest, const std::string& path);

enum class QcSelector { kAll, kGood, kBad };
std::optional<QcSelector> ParseQcSelector(std::string_view text);

struct FilterResult {
  Manifest manifest;
  // One message per unrated entry dropped by a good/bad selector.
  std::vector<std::string> warnings;
};

// Order-preserving subset. Unrated entries belong to neither good nor bad.
FilterResult FilterManifest(const Manifest& manifest, QcSelector selector);

}  // namespace ulfsynth

#endif  // ULFSYNTH_LABELHARM_MANIFEST_H_
