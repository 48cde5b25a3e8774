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

#ifndef ULFSYNTH_ENSEMBLE_RECIPE_H_
#define ULFSYNTH_ENSEMBLE_RECIPE_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ulfsynth/ensemble/majority_vote.h"
#include "ulfsynth/labelharm/manifest.h"

namespace ulfsynth {

// Either a model's prediction files (path pattern with "{subject_id}") or
// the fused output of another recipe.
struct RecipeMember {
  std::string model;
  std::string path_pattern;
  std::string recipe;

  bool IsRecipe() const { return !recipe.empty(); }
  std::string DisplayName() const { return IsRecipe() ? "recipe:" + recipe : model; }
};

struct EnsembleRecipe {
  std::string name;
  std::vector<RecipeMember> members;
  TieBreak tie_break = TieBreak::kFirstMember;
};

struct RecipeBook {
  std::vector<EnsembleRecipe> recipes;
  // Relative path patterns resolve against this directory.
  std::string base_dir;

  const EnsembleRecipe* Find(const std::string& name) const;
  std::string ResolvePattern(const std::string& pattern,
                             const std::string& subject_id) const;
};

// Throws ConfigError for: fewer than 2 members, duplicate recipe names,
// members naming unknown recipes, reference cycles, members with neither or
// both of path/recipe. Recipes are returned in dependency order.
RecipeBook RecipeBookFromJson(const nlohmann::json& json, std::string base_dir);
nlohmann::json RecipeBookToJson(const RecipeBook& book);
RecipeBook LoadRecipeBook(const std::string& path);

struct SubjectOutcome {
  std::string subject_id;
  std::string output_path;  // empty on error
  std::string error;
  bool ok() const { return error.empty(); }
};

struct RecipeRun {
  std::string recipe;
  std::vector<SubjectOutcome> subjects;
};

// Fuses every manifest subject for each recipe (all recipes, or only
// `only` plus its dependencies) into out_dir/<recipe>/<subject>.nii.gz and
// writes out_dir/<recipe>/provenance.json. A subject with a missing or
// unreadable member gets an error entry; other subjects still run.
std::vector<RecipeRun> RunRecipes(const RecipeBook& book, const Manifest& manifest,
                                  const std::string& out_dir,
                                  const std::optional<std::string>& only = std::nullopt);

}  // namespace ulfsynth

#endif  // ULFSYNTH_ENSEMBLE_RECIPE_H_
