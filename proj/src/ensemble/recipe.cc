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

#include "ulfsynth/ensemble/recipe.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/nifti.h"

namespace ulfsynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::string_view kSubjectToken = "{subject_id}";

std::string RequireString(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
    throw ConfigError(where + "." + key + ": expected a non-empty string");
  }
  return j.at(key).get<std::string>();
}

// Depth-first ordering so every recipe follows the recipes it consumes.
void Visit(const std::map<std::string, const EnsembleRecipe*>& by_name,
           const EnsembleRecipe& r, std::set<std::string>& done,
           std::vector<std::string>& stack, std::vector<EnsembleRecipe>& out) {
  if (done.contains(r.name)) return;
  for (const std::string& s : stack) {
    if (s == r.name) {
      std::string cycle;
      for (const std::string& n : stack) cycle += n + " -> ";
      throw ConfigError("recipe reference cycle: " + cycle + r.name);
    }
  }
  stack.push_back(r.name);
  for (const RecipeMember& m : r.members) {
    if (m.IsRecipe()) Visit(by_name, *by_name.at(m.recipe), done, stack, out);
  }
  stack.pop_back();
  done.insert(r.name);
  out.push_back(r);
}

}  // namespace

const EnsembleRecipe* RecipeBook::Find(const std::string& name) const {
  for (const EnsembleRecipe& r : recipes) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::string RecipeBook::ResolvePattern(const std::string& pattern,
                                       const std::string& subject_id) const {
  std::string p = pattern;
  for (size_t at = p.find(kSubjectToken); at != std::string::npos;
       at = p.find(kSubjectToken, at + subject_id.size())) {
    p.replace(at, kSubjectToken.size(), subject_id);
  }
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / path).string();
}

RecipeBook RecipeBookFromJson(const json& j, std::string base_dir) {
  if (!j.is_object()) throw ConfigError("recipe file: expected an object");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion) {
    throw ConfigError("recipe file: schema_version must be " + std::to_string(kSchemaVersion));
  }
  if (!j.contains("recipes") || !j.at("recipes").is_array()) {
    throw ConfigError("recipe file: 'recipes' must be a list");
  }
  std::vector<EnsembleRecipe> parsed;
  std::map<std::string, const EnsembleRecipe*> by_name;
  const json& list = j.at("recipes");
  parsed.reserve(list.size());
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "recipes[" + std::to_string(i) + "]";
    const json& r = list[i];
    if (!r.is_object()) throw ConfigError(where + ": expected an object");
    EnsembleRecipe recipe;
    recipe.name = RequireString(r, "name", where);
    if (r.contains("tie_break")) {
      const auto t = r.at("tie_break").is_string()
                         ? ParseTieBreak(r.at("tie_break").get<std::string>())
                         : std::nullopt;
      if (!t) throw ConfigError(where + ".tie_break: expected first_member or lowest_label");
      recipe.tie_break = *t;
    }
    if (!r.contains("members") || !r.at("members").is_array()) {
      throw ConfigError(where + ".members: expected a list");
    }
    for (size_t m = 0; m < r.at("members").size(); ++m) {
      const json& mj = r.at("members")[m];
      const std::string mw = where + ".members[" + std::to_string(m) + "]";
      if (!mj.is_object()) throw ConfigError(mw + ": expected an object");
      RecipeMember member;
      const bool has_path = mj.contains("path"), has_recipe = mj.contains("recipe");
      if (has_path == has_recipe) {
        throw ConfigError(mw + ": give exactly one of 'path' or 'recipe'");
      }
      if (has_path) {
        member.path_pattern = RequireString(mj, "path", mw);
        member.model = RequireString(mj, "model", mw);
      } else {
        member.recipe = RequireString(mj, "recipe", mw);
        if (mj.contains("model")) member.model = RequireString(mj, "model", mw);
      }
      recipe.members.push_back(member);
    }
    if (recipe.members.size() < 2) {
      throw ConfigError(where + " ('" + recipe.name + "'): needs at least 2 members");
    }
    if (by_name.contains(recipe.name)) {
      throw ConfigError("duplicate recipe name '" + recipe.name + "'");
    }
    parsed.push_back(std::move(recipe));
    by_name[parsed.back().name] = &parsed.back();
  }
  for (const EnsembleRecipe& r : parsed) {
    for (const RecipeMember& m : r.members) {
      if (m.IsRecipe() && !by_name.contains(m.recipe)) {
        throw ConfigError("recipe '" + r.name + "' uses unknown recipe '" + m.recipe + "'");
      }
    }
  }
  RecipeBook book;
  book.base_dir = std::move(base_dir);
  std::set<std::string> done;
  std::vector<std::string> stack;
  for (const EnsembleRecipe& r : parsed) Visit(by_name, r, done, stack, book.recipes);
  return book;
}

json RecipeBookToJson(const RecipeBook& book) {
  json recipes = json::array();
  for (const EnsembleRecipe& r : book.recipes) {
    json members = json::array();
    for (const RecipeMember& m : r.members) {
      json mj = json::object();
      if (!m.model.empty()) mj["model"] = m.model;
      if (m.IsRecipe()) {
        mj["recipe"] = m.recipe;
      } else {
        mj["path"] = m.path_pattern;
      }
      members.push_back(mj);
    }
    recipes.push_back({{"name", r.name},
                       {"tie_break", std::string(ToString(r.tie_break))},
                       {"members", members}});
  }
  return {{"schema_version", kSchemaVersion}, {"recipes", recipes}};
}

RecipeBook LoadRecipeBook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open recipe file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("recipe file '" + path + "': " + e.what());
  }
  return RecipeBookFromJson(j, fs::absolute(path).parent_path().string());
}

std::vector<RecipeRun> RunRecipes(const RecipeBook& book, const Manifest& manifest,
                                  const std::string& out_dir,
                                  const std::optional<std::string>& only) {
  std::set<std::string> wanted;
  if (only) {
    const EnsembleRecipe* target = book.Find(*only);
    if (target == nullptr) throw ConfigError("unknown recipe '" + *only + "'");
    std::vector<const EnsembleRecipe*> todo{target};
    while (!todo.empty()) {
      const EnsembleRecipe* r = todo.back();
      todo.pop_back();
      if (!wanted.insert(r->name).second) continue;
      for (const RecipeMember& m : r->members) {
        if (m.IsRecipe()) todo.push_back(book.Find(m.recipe));
      }
    }
  }
  std::vector<std::string> subjects;
  std::set<std::string> seen;
  for (const ManifestEntry& e : manifest.entries) {
    if (seen.insert(e.subject_id).second) subjects.push_back(e.subject_id);
  }

  std::map<std::string, std::map<std::string, std::string>> fused;  // recipe -> subject -> path
  std::vector<RecipeRun> runs;
  for (const EnsembleRecipe& recipe : book.recipes) {
    if (only && !wanted.contains(recipe.name)) continue;
    const fs::path dir = fs::path(out_dir) / recipe.name;
    fs::create_directories(dir);
    RecipeRun run{recipe.name, {}};
    json subject_log = json::array();
    for (const std::string& subject : subjects) {
      SubjectOutcome outcome{subject, "", ""};
      try {
        std::vector<LabelMap> maps;
        for (const RecipeMember& m : recipe.members) {
          std::string path;
          if (m.IsRecipe()) {
            auto it = fused[m.recipe].find(subject);
            if (it == fused[m.recipe].end()) {
              throw IoError("member recipe '" + m.recipe + "' has no output for this subject");
            }
            path = it->second;
          } else {
            path = book.ResolvePattern(m.path_pattern, subject);
            if (!fs::exists(path)) {
              throw IoError("member '" + m.model + "' has no prediction at " + path);
            }
          }
          maps.push_back(nifti::ReadLabelMap(path));
        }
        const LabelMap out = MajorityVote(maps, recipe.tie_break);
        const std::string path = (dir / (subject + ".nii.gz")).string();
        nifti::Write(out, path);
        outcome.output_path = path;
        fused[recipe.name][subject] = path;
      } catch (const Error& e) {
        outcome.error = e.what();
      }
      subject_log.push_back(outcome.ok() ? json{{"subject_id", subject},
                                                {"status", "ok"},
                                                {"output", outcome.output_path}}
                                         : json{{"subject_id", subject},
                                                {"status", "error"},
                                                {"error", outcome.error}});
      run.subjects.push_back(outcome);
    }
    json members = json::array();
    for (const RecipeMember& m : recipe.members) {
      members.push_back(m.IsRecipe()
                            ? json{{"recipe", m.recipe}, {"path", (fs::path(out_dir) / m.recipe).string()}}
                            : json{{"model", m.model},
                                   {"path", book.ResolvePattern(m.path_pattern, "{subject_id}")}});
    }
    const json provenance{{"recipe", recipe.name},
                          {"tie_break", std::string(ToString(recipe.tie_break))},
                          {"members", members},
                          {"subjects", subject_log}};
    std::ofstream(dir / "provenance.json") << provenance.dump(2) << '\n';
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace ulfsynth
