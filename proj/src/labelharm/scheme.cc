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

#include "ulfsynth/labelharm/scheme.h"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "ulfsynth/util/csv.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth {
namespace {

std::vector<SchemeClass> LisaClasses() {
  return {
      {1, "left hippocampus", false},
      {2, "right hippocampus", false},
      {3, "left lateral ventricle", true},
      {4, "right lateral ventricle", true},
      {5, "left caudate", false},
      {6, "right caudate", false},
      {7, "left lentiform", false},
      {8, "right lentiform", false},
  };
}

std::optional<Label> ParseLabel(const std::string& text) {
  Label value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

LabelScheme::LabelScheme(std::string name, std::vector<SchemeClass> classes,
                         std::map<Label, Label> mapping)
    : name_(std::move(name)),
      classes_(std::move(classes)),
      mapping_(std::move(mapping)) {
  std::sort(classes_.begin(), classes_.end(),
            [](const SchemeClass& a, const SchemeClass& b) { return a.id < b.id; });
  for (size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id != static_cast<Label>(i + 1)) {
      throw ConfigError("scheme " + name_ +
                        ": class ids must be unique and contiguous from 1");
    }
  }
  for (const auto& [source, target] : mapping_) {
    if (target < 0 || target > static_cast<Label>(classes_.size())) {
      throw ConfigError("scheme " + name_ + ": source " +
                        std::to_string(source) + " maps to unknown class " +
                        std::to_string(target));
    }
  }
}

LabelScheme LabelScheme::Identity(std::string name,
                                  std::vector<SchemeClass> classes) {
  std::map<Label, Label> mapping;
  for (const SchemeClass& c : classes) mapping[c.id] = c.id;
  return LabelScheme(std::move(name), std::move(classes), std::move(mapping));
}

Vocabulary LabelScheme::vocabulary() const {
  Vocabulary v;
  for (const SchemeClass& c : classes_) v[c.id] = c.name;
  return v;
}

std::vector<SchemeClass> LabelScheme::EvaluatedClasses() const {
  std::vector<SchemeClass> out;
  for (const SchemeClass& c : classes_) {
    if (!c.excluded_from_eval) out.push_back(c);
  }
  return out;
}

std::optional<SchemeClass> LabelScheme::FindClass(std::string_view name) const {
  for (const SchemeClass& c : classes_) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

LabelScheme LabelScheme::WithMapping(std::map<Label, Label> mapping) const {
  return LabelScheme(name_, classes_, std::move(mapping));
}

LabelScheme LisaScheme() { return LabelScheme::Identity("lisa", LisaClasses()); }

LabelScheme LisaPlusScheme() {
  std::vector<SchemeClass> classes = LisaClasses();
  classes.push_back({9, "white matter", false});
  classes.push_back({10, "cortical gray matter", false});
  classes.push_back({11, "csf", false});
  classes.push_back({12, "cerebellum", false});
  classes.push_back({13, "brainstem", false});
  classes.push_back({14, "deep gray matter", false});
  return LabelScheme::Identity("lisa_plus", std::move(classes));
}

BuiltinSchemes GetBuiltinSchemes() { return {LisaScheme(), LisaPlusScheme()}; }

LabelScheme BuiltinScheme(std::string_view name) {
  if (name == "lisa") return LisaScheme();
  if (name == "lisa_plus" || name == "lisa+") return LisaPlusScheme();
  throw ConfigError("unknown scheme \"" + std::string(name) +
                    "\" (expected lisa or lisa_plus)");
}

LabelScheme LoadMappingCsv(const std::string& path, const LabelScheme& base) {
  const std::vector<csv::Row> rows = csv::ReadFile(path);
  if (rows.empty() || rows[0] != csv::Row{"source_id", "source_name", "target_id"}) {
    throw ParseError(path +
                     ": row 1: header must be source_id,source_name,target_id");
  }
  std::map<Label, Label> mapping;
  for (size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::string where = path + ": row " + std::to_string(r + 1);
    if (row.size() != 3) throw ParseError(where + ": expected 3 fields");
    const auto source = ParseLabel(row[0]);
    if (!source || *source < 0) throw ParseError(where + ": bad source_id");
    const auto target = ParseLabel(row[2]);
    if (!target) throw ParseError(where + ": bad target_id");
    if (!mapping.emplace(*source, *target).second) {
      throw ParseError(where + ": duplicate source_id " + row[0]);
    }
  }
  return base.WithMapping(std::move(mapping));
}

LabelMap Remap(const LabelMap& labels, const LabelScheme& scheme) {
  std::unordered_map<Label, Label> cache;
  std::vector<Label> out(labels.size());
  const auto data = labels.data();
  for (int64_t i = 0; i < labels.size(); ++i) {
    const Label v = data[i];
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, scheme.Map(v)).first;
    out[i] = it->second;
  }
  return LabelMap(labels.grid(), std::move(out), scheme.vocabulary());
}

}  // namespace ulfsynth
