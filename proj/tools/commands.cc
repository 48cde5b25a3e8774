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

#include "commands.h"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ulfsynth/curation/misregistration.h"
#include "ulfsynth/curation/qc_store.h"
#include "ulfsynth/ensemble/recipe.h"
#include "ulfsynth/labelharm/manifest.h"
#include "ulfsynth/labelharm/scheme.h"
#include "ulfsynth/qcserve/server.h"
#include "ulfsynth/segmetrics/leaderboard.h"
#include "ulfsynth/segmetrics/metrics.h"
#include "ulfsynth/synthgen/config.h"
#include "ulfsynth/synthgen/generator.h"
#include "ulfsynth/synthgen/seeding.h"
#include "ulfsynth/util/csv.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/nifti.h"

#ifndef ULFSYNTH_VERSION
#define ULFSYNTH_VERSION "0.0.0"
#endif

namespace ulfsynth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> Log() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_logger_mt("ulfsynth");
    l->set_pattern("%^%l%$: %v");
    return l;
  }();
  return log;
}

// Raised by a command that finished but could not process every item.
struct PartialFailure {
  int failures;
};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

// Resolved options of the command, loadable again with --config.
void WriteSnapshot(const CLI::App& cmd, const std::string& section, const fs::path& dir) {
  fs::create_directories(dir);
  WriteText(dir / "run_config.toml", "# ulfsynth " ULFSYNTH_VERSION "\n[" + section + "]\n" +
                                         cmd.config_to_str(true, false));
}

template <typename F>
void ParallelFor(size_t n, int threads, F&& body) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

std::string Substitute(std::string pattern, const std::string& subject_id) {
  static constexpr std::string_view kToken = "{subject_id}";
  for (size_t at = pattern.find(kToken); at != std::string::npos;
       at = pattern.find(kToken, at + subject_id.size())) {
    pattern.replace(at, kToken.size(), subject_id);
  }
  return pattern;
}

Manifest LoadSelected(const std::string& path, const std::string& select) {
  const auto selector = ParseQcSelector(select);
  if (!selector) throw ConfigError("--select must be all, good or bad");
  FilterResult filtered = FilterManifest(LoadManifest(path), *selector);
  for (const std::string& w : filtered.warnings) Log()->warn("{}", w);
  return filtered.manifest;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string manifest;
  std::string out;
  std::string generator_config;
  std::string select = "all";
  std::string replay;
  uint64_t seed = 0;
  int samples = 1;
  int epoch = 0;
  int threads = 1;
  bool no_resolution = false;
};

std::string SampleStem(GtVariant variant, int epoch, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_e%d_%03d", std::string(ToString(variant)).c_str(), epoch,
                index);
  return buf;
}

void WriteSample(const SynthSample& sample, const fs::path& dir, const std::string& stem,
                 json sidecar) {
  fs::create_directories(dir);
  const fs::path image = dir / (stem + "_image.nii.gz");
  const fs::path labels = dir / (stem + "_labels.nii.gz");
  nifti::Write(sample.image, image.string());
  nifti::Write(sample.labels, labels.string());
  sidecar["outputs"] = {{"image", image.filename().string()},
                        {"labels", labels.filename().string()}};
  sidecar["provenance"] = sample.provenance;
  WriteText(dir / (stem + "_provenance.json"), sidecar.dump(2) + "\n");
}

int ReplaySample(const GenerateOptions& o) {
  std::ifstream in(o.replay);
  if (!in) throw IoError("cannot open '" + o.replay + "'");
  json sidecar;
  try {
    sidecar = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(o.replay + ": " + e.what());
  }
  if (!sidecar.contains("provenance") || !sidecar.contains("label_path") ||
      !sidecar.contains("stem")) {
    throw ParseError(o.replay + ": not a sample provenance file");
  }
  const LabelMap labels = nifti::ReadLabelMap(sidecar["label_path"].get<std::string>());
  const SynthSample sample = Replay(labels, sidecar["provenance"]);
  json out = sidecar;
  out.erase("provenance");
  out["replayed_from"] = fs::absolute(o.replay).string();
  WriteSample(sample, o.out, sidecar["stem"].get<std::string>(), out);
  Log()->info("replayed {} into {}", sidecar["stem"].get<std::string>(), o.out);
  return kExitOk;
}

int GenerateCommand(const GenerateOptions& o, const CLI::App& cmd) {
  if (o.out.empty()) throw ConfigError("--out is required");
  if (!o.replay.empty()) return ReplaySample(o);
  if (o.manifest.empty()) throw ConfigError("--manifest is required");
  if (o.samples < 1) throw ConfigError("--samples must be at least 1");
  if (o.epoch < 0) throw ConfigError("--epoch must be non-negative");
  const Manifest manifest = LoadSelected(o.manifest, o.select);
  GeneratorConfig config = o.generator_config.empty() ? GeneratorConfig{} : LoadConfig(o.generator_config);
  if (o.no_resolution) config.resolution.enabled = false;
  config.Validate();

  WriteSnapshot(cmd, "generate", o.out);
  WriteText(fs::path(o.out) / "generator_config.json", ConfigToJson(config).dump(2) + "\n");

  std::atomic<int> failures{0};
  ParallelFor(manifest.entries.size(), o.threads, [&](size_t e) {
    const ManifestEntry& entry = manifest.entries[e];
    try {
      const std::string label_path = fs::absolute(manifest.Resolve(entry.label_path)).string();
      const LabelMap labels = nifti::ReadLabelMap(label_path);
      for (int i = 0; i < o.samples; ++i) {
        const uint64_t seed = SampleSeed(o.seed, entry.subject_id, o.epoch, i);
        const std::string stem = SampleStem(entry.gt_variant, o.epoch, i);
        const json sidecar = {{"tool", "ulfsynth generate"},
                              {"version", ULFSYNTH_VERSION},
                              {"subject_id", entry.subject_id},
                              {"gt_variant", std::string(ToString(entry.gt_variant))},
                              {"label_path", label_path},
                              {"dataset_seed", o.seed},
                              {"epoch", o.epoch},
                              {"sample_index", i},
                              {"stem", stem}};
        WriteSample(ulfsynth::Generate(labels, seed, config), fs::path(o.out) / entry.subject_id, stem, sidecar);
      }
      Log()->info("{}: {} sample(s)", entry.subject_id, o.samples);
    } catch (const std::exception& ex) {
      ++failures;
      Log()->error("{}: {}", entry.subject_id, ex.what());
    }
  });
  if (failures > 0) throw PartialFailure{failures};
  return kExitOk;
}

// ---------------------------------------------------------------- remap

struct RemapOptions {
  std::string input;
  std::string output;
  std::string manifest;
  std::string out;
  std::string scheme = "lisa";
  std::string mapping;
};

int RemapCommand(const RemapOptions& o, const CLI::App& cmd) {
  LabelScheme scheme = BuiltinScheme(o.scheme);
  if (!o.mapping.empty()) scheme = LoadMappingCsv(o.mapping, scheme);
  const bool single = !o.input.empty() || !o.output.empty();
  const bool batch = !o.manifest.empty() || !o.out.empty();
  if (single == batch) {
    throw ConfigError("give either --input and --output, or --manifest and --out");
  }
  if (single) {
    if (o.input.empty() || o.output.empty()) throw ConfigError("--input and --output go together");
    nifti::Write(Remap(nifti::ReadLabelMap(o.input), scheme), o.output);
    return kExitOk;
  }
  if (o.manifest.empty() || o.out.empty()) throw ConfigError("--manifest and --out go together");
  Manifest manifest = LoadManifest(o.manifest);
  fs::create_directories(o.out);
  WriteSnapshot(cmd, "remap", o.out);
  int failures = 0;
  for (ManifestEntry& entry : manifest.entries) {
    const std::string name =
        entry.subject_id + "_" + std::string(ToString(entry.gt_variant)) + "_" + scheme.name() + ".nii.gz";
    try {
      nifti::Write(Remap(nifti::ReadLabelMap(manifest.Resolve(entry.label_path)), scheme),
                   (fs::path(o.out) / name).string());
      entry.label_path = name;
      entry.image_path = fs::absolute(manifest.Resolve(entry.image_path)).string();
    } catch (const std::exception& ex) {
      ++failures;
      Log()->error("{}: {}", entry.subject_id, ex.what());
    }
  }
  manifest.base_dir = o.out;
  SaveManifest(manifest, (fs::path(o.out) / "manifest.json").string());
  if (failures > 0) throw PartialFailure{failures};
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string manifest;
  std::vector<std::string> predictions;  // name=pattern
  std::string out;
  std::string scheme = "lisa";
  std::string gt_variant;
  std::string normalization = "pooled";
  std::string missing = "exclude";
  int threads = 1;
};

int EvaluateCommand(const EvaluateOptions& o, const CLI::App& cmd) {
  LeaderboardOptions board_options;
  board_options.normalization = ParseNormalizationMode(o.normalization);
  board_options.missing = ParseMissingPolicy(o.missing);
  const std::vector<SchemeClass> classes = BuiltinScheme(o.scheme).EvaluatedClasses();
  std::vector<std::pair<std::string, std::string>> submissions;
  std::set<std::string> names;
  for (const std::string& p : o.predictions) {
    const size_t eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
      throw ConfigError("--pred expects NAME=PATTERN, got '" + p + "'");
    }
    if (!names.insert(p.substr(0, eq)).second) {
      throw ConfigError("duplicate submission name '" + p.substr(0, eq) + "'");
    }
    submissions.emplace_back(p.substr(0, eq), p.substr(eq + 1));
  }
  if (submissions.empty()) throw ConfigError("at least one --pred NAME=PATTERN is required");

  Manifest manifest = LoadManifest(o.manifest);
  if (!o.gt_variant.empty()) {
    const auto v = ParseGtVariant(o.gt_variant);
    if (!v) throw ConfigError("--gt-variant must be GT_HF or GT_LF");
    std::erase_if(manifest.entries, [&](const ManifestEntry& e) { return e.gt_variant != *v; });
  }
  std::set<std::string> seen;
  for (const ManifestEntry& e : manifest.entries) {
    if (!seen.insert(e.subject_id).second) {
      throw ConfigError("subject '" + e.subject_id +
                        "' has several ground truths; choose one with --gt-variant");
    }
  }
  fs::create_directories(o.out);
  WriteSnapshot(cmd, "evaluate", o.out);

  std::map<std::string, std::vector<MetricsReport>> all;
  int failures = 0;
  for (const auto& [name, pattern] : submissions) {
    std::vector<std::optional<MetricsReport>> reports(manifest.entries.size());
    std::mutex log_mu;
    std::atomic<int> failed{0};
    ParallelFor(manifest.entries.size(), o.threads, [&](size_t i) {
      const ManifestEntry& e = manifest.entries[i];
      try {
        const LabelMap gt = nifti::ReadLabelMap(manifest.Resolve(e.label_path));
        const LabelMap pred = nifti::ReadLabelMap(Substitute(pattern, e.subject_id));
        reports[i] = Evaluate(pred, gt, classes, e.subject_id);
      } catch (const std::exception& ex) {
        ++failed;
        Log()->error("{} / {}: {}", name, e.subject_id, ex.what());
      }
    });
    failures += failed;
    std::vector<MetricsReport>& done = all[name];
    for (auto& r : reports) {
      if (r) done.push_back(std::move(*r));
    }
    std::ofstream csv(fs::path(o.out) / (name + "_metrics.csv"));
    WriteReportsCsv(csv, done);
    if (!csv) throw IoError("cannot write metrics for '" + name + "'");
  }
  const Leaderboard board = BuildLeaderboard(all, board_options);
  std::ofstream csv(fs::path(o.out) / "leaderboard.csv");
  WriteLeaderboardCsv(csv, board);
  if (!csv) throw IoError("cannot write leaderboard");
  for (size_t r = 0; r < board.rows.size(); ++r) {
    Log()->info("#{} {} norm_avg={}", r + 1, board.rows[r].submission, board.rows[r].norm_avg);
  }
  if (failures > 0) throw PartialFailure{failures};
  return kExitOk;
}

// ---------------------------------------------------------------- ensemble

struct EnsembleOptions {
  std::string recipe;
  std::string manifest;
  std::string out;
  std::string only;
};

int EnsembleCommand(const EnsembleOptions& o, const CLI::App& cmd) {
  const RecipeBook book = LoadRecipeBook(o.recipe);
  const Manifest manifest = LoadManifest(o.manifest);
  fs::create_directories(o.out);
  WriteSnapshot(cmd, "ensemble", o.out);
  const auto runs = RunRecipes(book, manifest, o.out,
                               o.only.empty() ? std::nullopt : std::optional<std::string>(o.only));
  int failures = 0;
  for (const RecipeRun& run : runs) {
    int ok = 0;
    for (const SubjectOutcome& s : run.subjects) {
      if (s.ok()) {
        ++ok;
      } else {
        ++failures;
        Log()->error("{} / {}: {}", run.recipe, s.subject_id, s.error);
      }
    }
    Log()->info("{}: {}/{} subjects fused", run.recipe, ok, run.subjects.size());
  }
  if (failures > 0) throw PartialFailure{failures};
  return kExitOk;
}

// ---------------------------------------------------------------- qc

struct QcFlagOptions {
  std::string scores;
  std::string manifest;
  std::string pred;
  std::vector<int> sentinels;
  std::optional<double> threshold;
  std::string out;
  int threads = 1;
};

std::vector<SubjectScore> ReadScoresCsv(const std::string& path) {
  const std::vector<csv::Row> rows = csv::ReadFile(path);
  if (rows.empty() || rows[0] != csv::Row{"subject_id", "score"}) {
    throw ParseError(path + ": row 1: header must be subject_id,score");
  }
  std::vector<SubjectScore> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    const std::string where = path + ": row " + std::to_string(r + 1);
    if (rows[r].size() != 2 || rows[r][0].empty()) throw ParseError(where + ": expected subject_id,score");
    SubjectScore s{rows[r][0], std::nullopt};
    if (!rows[r][1].empty()) {
      double v = 0;
      const std::string& t = rows[r][1];
      auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || end != t.data() + t.size()) {
        throw ParseError(where + ": bad score '" + t + "'");
      }
      s.score = v;
    }
    out.push_back(s);
  }
  return out;
}

int QcFlag(const QcFlagOptions& o) {
  if (o.scores.empty() == o.manifest.empty()) {
    throw ConfigError("give either --scores or --manifest with --pred");
  }
  std::vector<SubjectScore> scores;
  std::map<std::string, std::vector<Label>> missing;
  int failures = 0;
  std::vector<Label> sentinels(o.sentinels.begin(), o.sentinels.end());
  if (sentinels.empty()) sentinels = DefaultSentinels();
  if (!o.scores.empty()) {
    scores = ReadScoresCsv(o.scores);
  } else {
    if (o.pred.empty()) throw ConfigError("--manifest needs --pred PATTERN");
    const Manifest manifest = LoadManifest(o.manifest);
    std::vector<std::optional<SentinelScore>> computed(manifest.entries.size());
    std::atomic<int> failed{0};
    ParallelFor(manifest.entries.size(), o.threads, [&](size_t i) {
      const ManifestEntry& e = manifest.entries[i];
      try {
        computed[i] = ComputeSentinelScore(e.subject_id,
                                           nifti::ReadLabelMap(Substitute(o.pred, e.subject_id)),
                                           nifti::ReadLabelMap(manifest.Resolve(e.label_path)),
                                           sentinels);
      } catch (const std::exception& ex) {
        ++failed;
        Log()->error("{}: {}", e.subject_id, ex.what());
      }
    });
    failures = failed;
    for (size_t i = 0; i < computed.size(); ++i) {
      const std::string& id = manifest.entries[i].subject_id;
      scores.push_back({id, computed[i] ? computed[i]->mean_dsc : std::nullopt});
      if (computed[i] && !computed[i]->missing.empty()) {
        missing[id] = computed[i]->missing;
        Log()->warn("{}: {} sentinel structure(s) missing from the ground truth", id,
                    computed[i]->missing.size());
      }
    }
  }
  const FlagResult result = FlagMisregistration(scores, o.threshold);
  json j = ToJson(result);
  j["sentinels"] = sentinels;
  for (json& s : j["subjects"]) {
    auto it = missing.find(s["subject_id"].get<std::string>());
    s["missing_structures"] = it == missing.end() ? std::vector<Label>{} : it->second;
  }
  if (!o.out.empty()) {
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    WriteText(o.out, j.dump(2) + "\n");
  }
  if (result.degenerate) {
    Log()->warn("all scores identical; no split, nothing flagged");
  } else {
    Log()->info("threshold {} ({}), {} suspect(s) of {}", result.threshold,
                result.manual ? "manual" : "automatic", result.NumSuspects(), result.subjects.size());
  }
  for (const SubjectFlag& f : result.subjects) {
    if (f.status == FlagStatus::kSuspect) std::cout << f.subject_id << '\n';
  }
  if (failures > 0) throw PartialFailure{failures};
  return kExitOk;
}

struct QcApplyOptions {
  std::string manifest;
  std::string ratings;
  std::string out;
  std::string select = "all";
};

int QcApply(const QcApplyOptions& o) {
  const auto selector = ParseQcSelector(o.select);
  if (!selector) throw ConfigError("--select must be all, good or bad");
  const ApplyRatingsResult applied = ApplyRatings(LoadManifest(o.manifest), ImportCsv(o.ratings));
  for (const std::string& w : applied.warnings) Log()->warn("{}", w);
  const FilterResult filtered = FilterManifest(applied.manifest, *selector);
  Manifest out = filtered.manifest;
  // Keep entry paths valid from the new location.
  for (ManifestEntry& e : out.entries) {
    e.image_path = fs::absolute(out.Resolve(e.image_path)).string();
    e.label_path = fs::absolute(out.Resolve(e.label_path)).string();
  }
  if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
  SaveManifest(out, o.out);
  Log()->info("{} of {} entries written", out.entries.size(), applied.manifest.entries.size());
  return kExitOk;
}

struct QcExportOptions {
  std::string ratings;
  std::string out;
};

int QcExport(const QcExportOptions& o) {
  ExportCsv(ImportCsv(o.ratings), o.out);
  return kExitOk;
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
  std::string manifest;
  std::string ratings;
  std::string flags;
  std::string pred;
  std::string ui;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int Serve(const ServeOptions& o) {
  qcserve::ServiceOptions so;
  so.manifest = LoadManifest(o.manifest);
  so.ratings_path = o.ratings;
  if (!o.flags.empty()) so.flags_path = o.flags;
  if (!o.pred.empty()) so.prediction_pattern = o.pred;
  qcserve::QcService service(std::move(so));
  qcserve::Server server(service, o.ui.empty() ? std::nullopt : std::optional<std::string>(o.ui));
  const int port = server.Start(o.host, o.port);
  const size_t subjects = json::parse(service.ListSubjects().body).size();
  Log()->info("serving {} subject(s) on http://{}:{}/", subjects, o.host, port);
  server.Wait();
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args) {
  CLI::App app{"Synthetic ultra-low-field MRI toolkit: generation, label harmonization, "
               "evaluation, ensembling and annotation QC.",
               "ulfsynth"};
  app.set_version_flag("--version", ULFSYNTH_VERSION);
  app.require_subcommand(1);
  std::string default_config;
  if (const char* dir = std::getenv(kConfigDirEnv); dir != nullptr && *dir != '\0') {
    if (fs::exists(fs::path(dir) / "ulfsynth.toml")) default_config = (fs::path(dir) / "ulfsynth.toml").string();
  }
  app.set_config("--config", default_config,
                 "TOML file with one [command] section of option values; flags given on the "
                 "command line take precedence. Relative paths are also looked up in $" +
                     std::string(kConfigDirEnv))
      ->transform([](const std::string& path) {
        const char* dir = std::getenv(kConfigDirEnv);
        if (fs::exists(path) || dir == nullptr || fs::path(path).is_absolute()) return path;
        const fs::path alt = fs::path(dir) / path;
        return fs::exists(alt) ? alt.string() : path;
      });
  app.allow_config_extras(CLI::config_extras_mode::error);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  GenerateOptions gen;
  CLI::App* g = app.add_subcommand("generate", "Synthesize image/label pairs from label maps");
  g->add_option("--manifest", gen.manifest, "Dataset manifest (JSON) listing the label maps");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--generator-config", gen.generator_config, "Generator config (JSON); defaults built in");
  g->add_option("--seed", gen.seed, "Dataset seed (unsigned 64-bit)")->capture_default_str();
  g->add_option("--samples", gen.samples, "Samples per manifest entry")->capture_default_str();
  g->add_option("--epoch", gen.epoch, "Epoch number folded into the per-sample seed")->capture_default_str();
  g->add_option("--threads", gen.threads, "Worker threads")->capture_default_str();
  g->add_option("--select", gen.select, "Manifest entries to use: all, good or bad")->capture_default_str();
  g->add_flag("--no-resolution", gen.no_resolution, "Disable the acquisition (slice thickness) stage");
  g->add_option("--replay", gen.replay, "Re-create one sample from its _provenance.json into --out");

  RemapOptions rm;
  CLI::App* r = app.add_subcommand("remap", "Map source labels onto a target scheme");
  r->add_option("--input", rm.input, "Single label map to remap");
  r->add_option("--output", rm.output, "Where to write the remapped map");
  r->add_option("--manifest", rm.manifest, "Remap every label map of a manifest");
  r->add_option("--out", rm.out, "Output directory for manifest mode");
  r->add_option("--scheme", rm.scheme, "Target scheme: lisa or lisa_plus")->capture_default_str();
  r->add_option("--mapping", rm.mapping, "source_id,source_name,target_id CSV");

  EvaluateOptions ev;
  CLI::App* e = app.add_subcommand("evaluate", "Per-subject metrics and a normalized leaderboard");
  e->add_option("--manifest", ev.manifest, "Manifest with the ground-truth label maps")->required();
  e->add_option("--pred", ev.predictions,
                "Submission as NAME=PATTERN, '{subject_id}' substituted; repeatable")
      ->required();
  e->add_option("--out", ev.out, "Output directory")->required();
  e->add_option("--scheme", ev.scheme, "Label scheme: lisa or lisa_plus")->capture_default_str();
  e->add_option("--gt-variant", ev.gt_variant, "Use only GT_HF or GT_LF entries");
  e->add_option("--normalization", ev.normalization, "pooled or per_label")->capture_default_str();
  e->add_option("--missing", ev.missing, "exclude or worst")->capture_default_str();
  e->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();

  EnsembleOptions en;
  CLI::App* n = app.add_subcommand("ensemble", "Voxel-wise majority vote from a recipe file");
  n->add_option("--recipe", en.recipe, "Recipe file (JSON)")->required();
  n->add_option("--manifest", en.manifest, "Manifest naming the subjects")->required();
  n->add_option("--out", en.out, "Output directory")->required();
  n->add_option("--only", en.only, "Run one recipe and what it depends on");

  CLI::App* qc = app.add_subcommand("qc", "Annotation quality control");
  qc->require_subcommand(1);
  QcFlagOptions qf;
  CLI::App* qflag = qc->add_subcommand("flag", "Propose misregistered subjects from sentinel Dice");
  qflag->add_option("--scores", qf.scores, "subject_id,score CSV");
  qflag->add_option("--manifest", qf.manifest, "Manifest with ground truths (with --pred)");
  qflag->add_option("--pred", qf.pred, "Reference predictions, '{subject_id}' substituted");
  qflag->add_option("--sentinels", qf.sentinels, "Sentinel label ids (default 4,6)")->delimiter(',');
  qflag->add_option("--threshold", qf.threshold, "Fixed threshold instead of the automatic split");
  qflag->add_option("--out", qf.out, "Flag results (JSON)");
  qflag->add_option("--threads", qf.threads, "Worker threads")->capture_default_str();
  QcApplyOptions qa;
  CLI::App* qapply = qc->add_subcommand("apply", "Set manifest qc_status from ratings");
  qapply->add_option("--manifest", qa.manifest, "Input manifest")->required();
  qapply->add_option("--ratings", qa.ratings, "QC ratings CSV")->required();
  qapply->add_option("--out", qa.out, "Output manifest")->required();
  qapply->add_option("--select", qa.select, "Keep all, good or bad entries")->capture_default_str();
  QcExportOptions qe;
  CLI::App* qexport = qc->add_subcommand("export", "Latest rating per subject as QC CSV");
  qexport->add_option("--ratings", qe.ratings, "Rating history CSV")->required();
  qexport->add_option("--out", qe.out, "Output CSV")->required();

  ServeOptions sv;
  CLI::App* s = app.add_subcommand("serve", "HTTP service for the QC rating workflow");
  s->add_option("--manifest", sv.manifest, "Manifest of subjects to rate")->required();
  s->add_option("--ratings", sv.ratings, "Rating history CSV, created if absent")->required();
  s->add_option("--flags", sv.flags, "Output of `qc flag` for sentinel scores");
  s->add_option("--pred", sv.pred, "Prediction label maps, '{subject_id}' substituted");
  s->add_option("--ui", sv.ui, "Directory of the built web UI, served at /");
  s->add_option("--host", sv.host, "Bind address")->capture_default_str();
  s->add_option("--port", sv.port, "Port (0 picks a free one)")->capture_default_str();

  for (CLI::App* sub : {g, r, e, n, qc, qflag, qapply, qexport, s}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  Log()->set_level(spdlog::level::from_str(log_level));

  try {
    if (g->parsed()) return GenerateCommand(gen, *g);
    if (r->parsed()) return RemapCommand(rm, *r);
    if (e->parsed()) return EvaluateCommand(ev, *e);
    if (n->parsed()) return EnsembleCommand(en, *n);
    if (qflag->parsed()) return QcFlag(qf);
    if (qapply->parsed()) return QcApply(qa);
    if (qexport->parsed()) return QcExport(qe);
    if (s->parsed()) return Serve(sv);
  } catch (const PartialFailure& p) {
    Log()->error("{} item(s) failed", p.failures);
    return kExitPartial;
  } catch (const ConfigError& ex) {
    Log()->error("{}", ex.what());
    return kExitConfig;
  } catch (const ParseError& ex) {
    Log()->error("{}", ex.what());
    return kExitConfig;
  } catch (const ValidationError& ex) {
    Log()->error("{}", ex.what());
    return kExitConfig;
  } catch (const IoError& ex) {
    Log()->error("{}", ex.what());
    return kExitConfig;
  } catch (const std::exception& ex) {
    Log()->error("{}", ex.what());
    return kExitPartial;
  }
  return kExitConfig;
}

}  // namespace ulfsynth::cli
