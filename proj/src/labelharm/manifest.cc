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

#include "ulfsynth/labelharm/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "ulfsynth/util/errors.h"

namespace ulfsynth {
namespace {

using nlohmann::json;

std::string RequireString(const json& entry, const char* field, size_t index,
                          bool required) {
  const std::string where =
      "entries[" + std::to_string(index) + "]." + field;
  auto it = entry.find(field);
  if (it == entry.end()) {
    if (required) throw ParseError(where + ": missing");
    return {};
  }
  if (!it->is_string()) throw ParseError(where + ": expected a string");
  return it->get<std::string>();
}

}  // namespace

std::string_view ToString(GtVariant v) {
  return v == GtVariant::kHighField ? "GT_HF" : "GT_LF";
}
std::string_view ToString(QcStatus s) {
  switch (s) {
    case QcStatus::kGood: return "good";
    case QcStatus::kBad: return "bad";
    case QcStatus::kUnrated: return "unrated";
  }
  return "unrated";
}
std::string_view ToString(Split s) { return s == Split::kTrain ? "train" : "val"; }

std::optional<GtVariant> ParseGtVariant(std::string_view text) {
  if (text == "GT_HF") return GtVariant::kHighField;
  if (text == "GT_LF") return GtVariant::kLowField;
  return std::nullopt;
}
std::optional<QcStatus> ParseQcStatus(std::string_view text) {
  if (text == "good") return QcStatus::kGood;
  if (text == "bad") return QcStatus::kBad;
  if (text == "unrated") return QcStatus::kUnrated;
  return std::nullopt;
}
std::optional<Split> ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  return std::nullopt;
}

std::string Manifest::Resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void Manifest::Validate() const {
  std::set<std::pair<std::string, GtVariant>> seen;
  for (size_t i = 0; i < entries.size(); ++i) {
    const ManifestEntry& e = entries[i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    if (e.subject_id.empty()) throw ValidationError(where + ".subject_id is empty");
    if (e.image_path.empty()) throw ValidationError(where + ".image_path is empty");
    if (e.label_path.empty()) throw ValidationError(where + ".label_path is empty");
    if (!seen.emplace(e.subject_id, e.gt_variant).second) {
      throw ValidationError(where + ": duplicate (subject_id, gt_variant) = (" +
                            e.subject_id + ", " +
                            std::string(ToString(e.gt_variant)) + ")");
    }
  }
}

Manifest ManifestFromJson(const json& doc) {
  if (!doc.is_object()) throw ParseError("manifest: top level must be an object");
  Manifest m;
  m.extra = doc;
  auto version = doc.find("schema_version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw ParseError("schema_version: missing or not an integer");
  }
  m.schema_version = version->get<int>();
  if (m.schema_version != Manifest::kSchemaVersion) {
    throw ParseError("schema_version: unsupported version " +
                     std::to_string(m.schema_version));
  }
  auto entries = doc.find("entries");
  if (entries == doc.end() || !entries->is_array()) {
    throw ParseError("entries: missing or not an array");
  }
  m.extra.erase("schema_version");
  m.extra.erase("entries");

  for (size_t i = 0; i < entries->size(); ++i) {
    const json& item = (*entries)[i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where + ": expected an object");
    ManifestEntry e;
    e.subject_id = RequireString(item, "subject_id", i, true);
    e.image_path = RequireString(item, "image_path", i, true);
    e.label_path = RequireString(item, "label_path", i, true);
    const std::string variant = RequireString(item, "gt_variant", i, true);
    auto gt = ParseGtVariant(variant);
    if (!gt) throw ParseError(where + ".gt_variant: unknown value \"" + variant + "\"");
    e.gt_variant = *gt;
    if (item.contains("qc_status")) {
      const std::string status = RequireString(item, "qc_status", i, true);
      auto qc = ParseQcStatus(status);
      if (!qc) throw ParseError(where + ".qc_status: unknown value \"" + status + "\"");
      e.qc_status = *qc;
    }
    if (item.contains("split")) {
      const std::string split = RequireString(item, "split", i, true);
      auto s = ParseSplit(split);
      if (!s) throw ParseError(where + ".split: unknown value \"" + split + "\"");
      e.split = *s;
    }
    e.extra = item;
    for (const char* known : {"subject_id", "image_path", "label_path",
                              "gt_variant", "qc_status", "split"}) {
      e.extra.erase(known);
    }
    m.entries.push_back(std::move(e));
  }
  m.Validate();
  return m;
}

json ManifestToJson(const Manifest& m) {
  json doc = m.extra;
  doc["schema_version"] = m.schema_version;
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    json item = e.extra;
    item["subject_id"] = e.subject_id;
    item["image_path"] = e.image_path;
    item["label_path"] = e.label_path;
    item["gt_variant"] = ToString(e.gt_variant);
    item["qc_status"] = ToString(e.qc_status);
    item["split"] = ToString(e.split);
    entries.push_back(std::move(item));
  }
  doc["entries"] = std::move(entries);
  return doc;
}

Manifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  Manifest m;
  try {
    m = ManifestFromJson(doc);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  m.base_dir = std::filesystem::path(path).parent_path().string();
  return m;
}

void SaveManifest(const Manifest& manifest, const std::string& path) {
  manifest.Validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path);
  out << ManifestToJson(manifest).dump(2) << "\n";
  if (!out) throw IoError("write error on " + path);
}

std::optional<QcSelector> ParseQcSelector(std::string_view text) {
  if (text == "all") return QcSelector::kAll;
  if (text == "good") return QcSelector::kGood;
  if (text == "bad") return QcSelector::kBad;
  return std::nullopt;
}

FilterResult FilterManifest(const Manifest& manifest, QcSelector selector) {
  FilterResult result;
  result.manifest.schema_version = manifest.schema_version;
  result.manifest.extra = manifest.extra;
  result.manifest.base_dir = manifest.base_dir;
  for (const ManifestEntry& e : manifest.entries) {
    if (selector == QcSelector::kAll) {
      result.manifest.entries.push_back(e);
      continue;
    }
    if (e.qc_status == QcStatus::kUnrated) {
      result.warnings.push_back("subject " + e.subject_id + " (" +
                                std::string(ToString(e.gt_variant)) +
                                ") is unrated; excluded");
      continue;
    }
    const QcStatus want =
        selector == QcSelector::kGood ? QcStatus::kGood : QcStatus::kBad;
    if (e.qc_status == want) result.manifest.entries.push_back(e);
  }
  return result;
}

}  // namespace ulfsynth
