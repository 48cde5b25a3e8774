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

#ifndef ULFSYNTH_LABELHARM_SCHEME_H_
#define ULFSYNTH_LABELHARM_SCHEME_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ulfsynth/volgrid/image.h"

namespace ulfsynth {

struct SchemeClass {
  Label id;
  std::string name;
  // Carried through training but skipped by evaluation (lateral ventricles).
  bool excluded_from_eval = false;
};

// Output label set plus a source-id -> output-id table. Source ids absent
// from the table map to background.
class LabelScheme {
 public:
  // Throws ConfigError unless class ids are unique and contiguous from 1 and
  // every mapping target is 0 or a class id.
  LabelScheme(std::string name, std::vector<SchemeClass> classes,
              std::map<Label, Label> mapping);

  // Scheme whose classes are `classes` and whose mapping is the identity on
  // their ids.
  static LabelScheme Identity(std::string name,
                              std::vector<SchemeClass> classes);

  const std::string& name() const { return name_; }
  const std::vector<SchemeClass>& classes() const { return classes_; }
  const std::map<Label, Label>& mapping() const { return mapping_; }

  Label Map(Label source) const {
    auto it = mapping_.find(source);
    return it == mapping_.end() ? 0 : it->second;
  }
  Vocabulary vocabulary() const;
  // Classes evaluation should report, in id order.
  std::vector<SchemeClass> EvaluatedClasses() const;
  std::optional<SchemeClass> FindClass(std::string_view name) const;

  // Same classes, different source table.
  LabelScheme WithMapping(std::map<Label, Label> mapping) const;

 private:
  std::string name_;
  std::vector<SchemeClass> classes_;
  std::map<Label, Label> mapping_;
};

// Eight target structures, left before right:
// hippocampus, lateral ventricle, caudate, lentiform.
LabelScheme LisaScheme();
// LISA plus six whole-brain groups (ids 9..14): white matter, cortical gray
// matter, CSF, cerebellum, brainstem, deep gray matter.
LabelScheme LisaPlusScheme();

struct BuiltinSchemes {
  LabelScheme lisa;
  LabelScheme lisa_plus;
};
BuiltinSchemes GetBuiltinSchemes();
// "lisa" or "lisa_plus" (also "lisa+"); throws ConfigError otherwise.
LabelScheme BuiltinScheme(std::string_view name);

// Reads a source_id,source_name,target_id CSV and applies it to `base`.
// Throws ParseError with the row number on malformed rows.
LabelScheme LoadMappingCsv(const std::string& path, const LabelScheme& base);

// Replaces each voxel by scheme.Map(voxel). The output vocabulary is the
// scheme's classes; the grid is unchanged.
LabelMap Remap(const LabelMap& labels, const LabelScheme& scheme);

}  // namespace ulfsynth

#endif  // ULFSYNTH_LABELHARM_SCHEME_H_
