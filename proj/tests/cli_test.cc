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

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.h"
#include "gtest/gtest.h"
#include "test_support.h"
#include "ulfsynth/curation/misregistration.h"
#include "ulfsynth/curation/qc_store.h"
#include "ulfsynth/labelharm/manifest.h"
#include "ulfsynth/volgrid/nifti.h"

namespace ulfsynth::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ::ulfsynth::testing::TempDir;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json ReadJson(const fs::path& p) { return json::parse(Slurp(p)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(21);
    const Grid grid({12, 12, 12}, {1.5, 1.5, 1.5});
    for (const std::string id : {"sub-01", "sub-02"}) {
      const LabelMap labels = ::ulfsynth::testing::RandomBoxLabels(rng, grid, 8, 6);
      nifti::Write(labels, dir_.File(id + "_seg.nii.gz"));
      manifest_.entries.push_back({id, id + "_img.nii.gz", id + "_seg.nii.gz"});
    }
    SaveManifest(manifest_, dir_.File("manifest.json"));
  }

  int Cli(std::vector<std::string> args) { return ::ulfsynth::cli::Run(args); }

  std::string CaptureStdout(const std::vector<std::string>& args, int* code) {
    ::testing::internal::CaptureStdout();
    *code = ::ulfsynth::cli::Run(args);
    return ::testing::internal::GetCapturedStdout();
  }

  TempDir dir_;
  Manifest manifest_;
};

TEST_F(CliTest, HelpListsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> documented = {
      {"", {"--config", "--log-level", "--version"}},
      {"generate",
       {"--manifest", "--out", "--generator-config", "--seed", "--samples", "--epoch", "--threads",
        "--select", "--no-resolution", "--replay"}},
      {"remap", {"--input", "--output", "--manifest", "--out", "--scheme", "--mapping"}},
      {"evaluate",
       {"--manifest", "--pred", "--out", "--scheme", "--gt-variant", "--normalization", "--missing",
        "--threads"}},
      {"ensemble", {"--recipe", "--manifest", "--out", "--only"}},
      {"qc flag", {"--scores", "--manifest", "--pred", "--sentinels", "--threshold", "--out", "--threads"}},
      {"qc apply", {"--manifest", "--ratings", "--out", "--select"}},
      {"qc export", {"--ratings", "--out"}},
      {"serve", {"--manifest", "--ratings", "--flags", "--pred", "--ui", "--host", "--port"}},
  };
  for (const auto& [cmd, flags] : documented) {
    std::vector<std::string> args;
    std::istringstream words(cmd);
    for (std::string w; words >> w;) args.push_back(w);
    args.push_back("--help");
    int code = -1;
    const std::string help = CaptureStdout(args, &code);
    EXPECT_EQ(code, kExitOk);
    for (const std::string& f : flags) {
      EXPECT_NE(help.find(f), std::string::npos) << cmd << " --help lacks " << f;
    }
  }
}

TEST_F(CliTest, GenerateIsDeterministic) {
  const std::vector<std::string> base = {"generate", "--manifest", dir_.File("manifest.json"),
                                         "--seed", "42", "--samples", "2", "--threads", "2"};
  auto run = [&](const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--out", dir_.File(out)});
    return Cli(args);
  };
  ASSERT_EQ(run("a"), kExitOk);
  ASSERT_EQ(run("b"), kExitOk);
  int files = 0;
  for (const auto& f : fs::recursive_directory_iterator(dir_.path() / "a")) {
    if (!f.is_regular_file() || f.path().filename() == "run_config.toml") continue;
    const fs::path other = dir_.path() / "b" / fs::relative(f.path(), dir_.path() / "a");
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(Slurp(f.path()), Slurp(other)) << f.path();
    ++files;
  }
  // 2 subjects x 2 samples x (image, labels, provenance) + generator_config.json
  EXPECT_EQ(files, 13);
  EXPECT_TRUE(fs::exists(dir_.path() / "a/sub-01/GT_HF_e0_001_image.nii.gz"));
  const json side = ReadJson(dir_.path() / "a/sub-02/GT_HF_e0_000_provenance.json");
  EXPECT_EQ(side["subject_id"], "sub-02");
  EXPECT_EQ(side["dataset_seed"], 42);
  // Different seeds give different images.
  ASSERT_EQ(Cli({"generate", "--manifest", dir_.File("manifest.json"), "--seed", "43", "--out",
                 dir_.File("c")}),
            kExitOk);
  EXPECT_NE(Slurp(dir_.path() / "a/sub-01/GT_HF_e0_000_image.nii.gz"),
            Slurp(dir_.path() / "c/sub-01/GT_HF_e0_000_image.nii.gz"));
}

TEST_F(CliTest, ReplayReproducesASample) {
  ASSERT_EQ(Cli({"generate", "--manifest", dir_.File("manifest.json"), "--seed", "7", "--samples",
                 "3", "--out", dir_.File("gen")}),
            kExitOk);
  const fs::path side = dir_.path() / "gen/sub-02/GT_HF_e0_002_provenance.json";
  ASSERT_EQ(Cli({"generate", "--replay", side.string(), "--out", dir_.File("replay")}), kExitOk);
  for (const std::string suffix : {"_image.nii.gz", "_labels.nii.gz"}) {
    EXPECT_EQ(Slurp(dir_.path() / ("replay/GT_HF_e0_002" + suffix)),
              Slurp(dir_.path() / ("gen/sub-02/GT_HF_e0_002" + suffix)));
  }
  EXPECT_EQ(ReadJson(dir_.path() / "replay/GT_HF_e0_002_provenance.json")["provenance"],
            ReadJson(side)["provenance"]);
}

TEST_F(CliTest, NoResolutionShowsInProvenance) {
  ASSERT_EQ(Cli({"generate", "--manifest", dir_.File("manifest.json"), "--no-resolution", "--out",
                 dir_.File("g")}),
            kExitOk);
  const json prov = ReadJson(dir_.path() / "g/sub-01/GT_HF_e0_000_provenance.json")["provenance"];
  bool skipped = false;
  for (const json& s : prov["skipped"]) skipped |= s["name"] == "acquisition" && s["reason"] == "disabled";
  EXPECT_TRUE(skipped);
  for (const json& s : prov["stages"]) EXPECT_NE(s["name"], "acquisition");
  EXPECT_FALSE(prov["config"]["resolution"]["enabled"].get<bool>());
}

TEST_F(CliTest, MissingLabelFileIsPartialFailure) {
  fs::remove(dir_.File("sub-01_seg.nii.gz"));
  ::testing::internal::CaptureStderr();
  const int code = Cli({"generate", "--manifest", dir_.File("manifest.json"), "--out", dir_.File("g")});
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, kExitPartial);
  EXPECT_NE(err.find("sub-01"), std::string::npos) << err;
  EXPECT_TRUE(fs::exists(dir_.path() / "g/sub-02/GT_HF_e0_000_image.nii.gz"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(Cli({"generate", "--out", dir_.File("g")}), kExitConfig);
  EXPECT_EQ(Cli({"generate", "--manifest", dir_.File("nope.json"), "--out", dir_.File("g")}), kExitConfig);
  EXPECT_EQ(Cli({"generate", "--manifest", dir_.File("manifest.json"), "--seed", "-3"}), kExitConfig);
  EXPECT_EQ(Cli({"frobnicate"}), kExitConfig);
  EXPECT_EQ(Cli({}), kExitConfig);
  std::ofstream(dir_.File("bad.toml")) << "[generate]\nsede = 1\n";
  EXPECT_EQ(Cli({"generate", "--config", dir_.File("bad.toml")}), kExitConfig);
  std::ofstream(dir_.File("gen.json")) << R"({"schema_version": 1, "gamma": [2, 1]})";
  EXPECT_EQ(Cli({"generate", "--manifest", dir_.File("manifest.json"), "--generator-config",
                 dir_.File("gen.json"), "--out", dir_.File("g")}),
            kExitConfig);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(dir_.File("run.toml")) << "[generate]\nmanifest = \"" << dir_.File("manifest.json")
                                       << "\"\nseed = 5\nsamples = 3\nout = \"" << dir_.File("cfg")
                                       << "\"\n";
  ASSERT_EQ(Cli({"generate", "--config", dir_.File("run.toml"), "--samples", "1"}), kExitOk);
  EXPECT_TRUE(fs::exists(dir_.path() / "cfg/sub-01/GT_HF_e0_000_image.nii.gz"));
  EXPECT_FALSE(fs::exists(dir_.path() / "cfg/sub-01/GT_HF_e0_001_image.nii.gz"));
  EXPECT_EQ(ReadJson(dir_.path() / "cfg/sub-01/GT_HF_e0_000_provenance.json")["dataset_seed"], 5);

  // The snapshot replays the run exactly.
  const std::string snapshot = Slurp(dir_.path() / "cfg/run_config.toml");
  EXPECT_NE(snapshot.find("samples=1"), std::string::npos) << snapshot;
  ASSERT_EQ(Cli({"generate", "--config", dir_.File("cfg/run_config.toml"), "--out", dir_.File("again")}),
            kExitOk);
  EXPECT_EQ(Slurp(dir_.path() / "cfg/sub-02/GT_HF_e0_000_image.nii.gz"),
            Slurp(dir_.path() / "again/sub-02/GT_HF_e0_000_image.nii.gz"));
}

TEST_F(CliTest, ConfigDirectoryFromEnvironment) {
  fs::create_directories(dir_.path() / "conf");
  std::ofstream(dir_.File("conf/seed9.toml")) << "[generate]\nseed = 9\n";
  setenv(kConfigDirEnv, dir_.File("conf").c_str(), 1);
  const int code = Cli({"generate", "--config", "seed9.toml", "--manifest", dir_.File("manifest.json"),
                        "--out", dir_.File("env")});
  unsetenv(kConfigDirEnv);
  ASSERT_EQ(code, kExitOk);
  EXPECT_EQ(ReadJson(dir_.path() / "env/sub-01/GT_HF_e0_000_provenance.json")["dataset_seed"], 9);
}

TEST_F(CliTest, EvaluatePerfectSubmission) {
  std::mt19937_64 rng(2);
  const Grid grid({12, 12, 12}, {1.5, 1.5, 1.5});
  fs::create_directories(dir_.path() / "noisy");
  for (const ManifestEntry& e : manifest_.entries) {
    nifti::Write(::ulfsynth::testing::RandomBoxLabels(rng, grid, 8, 6),
                 dir_.File("noisy/" + e.subject_id + ".nii.gz"));
  }
  ASSERT_EQ(Cli({"evaluate", "--manifest", dir_.File("manifest.json"), "--pred",
                 "perfect=" + dir_.File("{subject_id}_seg.nii.gz"), "--pred",
                 "noisy=" + dir_.File("noisy/{subject_id}.nii.gz"), "--out", dir_.File("eval")}),
            kExitOk);
  const std::string board = Slurp(dir_.path() / "eval/leaderboard.csv");
  std::istringstream lines(board);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(first.rfind("1,perfect,1,", 0), 0u) << board;
  EXPECT_TRUE(fs::exists(dir_.path() / "eval/perfect_metrics.csv"));
  EXPECT_TRUE(fs::exists(dir_.path() / "eval/run_config.toml"));

  EXPECT_EQ(Cli({"evaluate", "--manifest", dir_.File("manifest.json"), "--pred",
                 "x=" + dir_.File("missing/{subject_id}.nii.gz"), "--out", dir_.File("eval2")}),
            kExitPartial);
  EXPECT_EQ(Cli({"evaluate", "--manifest", dir_.File("manifest.json"), "--pred", "oops", "--out",
                 dir_.File("eval3")}),
            kExitConfig);
}

TEST_F(CliTest, EnsembleOfIdenticalModels) {
  const json recipe = {{"schema_version", 1},
                       {"recipes",
                        {{{"name", "same"},
                          {"members",
                           {{{"model", "a"}, {"path", "{subject_id}_seg.nii.gz"}},
                            {{"model", "b"}, {"path", "{subject_id}_seg.nii.gz"}},
                            {{"model", "c"}, {"path", "{subject_id}_seg.nii.gz"}}}}}}}};
  std::ofstream(dir_.File("recipe.json")) << recipe.dump();
  ASSERT_EQ(Cli({"ensemble", "--recipe", dir_.File("recipe.json"), "--manifest",
                 dir_.File("manifest.json"), "--out", dir_.File("ens")}),
            kExitOk);
  for (const ManifestEntry& e : manifest_.entries) {
    const LabelMap fused = nifti::ReadLabelMap(dir_.File("ens/same/" + e.subject_id + ".nii.gz"));
    const LabelMap input = nifti::ReadLabelMap(dir_.File(e.subject_id + "_seg.nii.gz"));
    EXPECT_TRUE(std::equal(fused.data().begin(), fused.data().end(), input.data().begin()));
  }
  fs::remove(dir_.File("sub-02_seg.nii.gz"));
  EXPECT_EQ(Cli({"ensemble", "--recipe", dir_.File("recipe.json"), "--manifest",
                 dir_.File("manifest.json"), "--out", dir_.File("ens2")}),
            kExitPartial);
}

TEST_F(CliTest, QcFlagListsOracleSuspects) {
  std::ofstream scores(dir_.File("scores.csv"));
  scores << "subject_id,score\n";
  std::vector<std::string> expected;
  for (int i = 0; i < 79; ++i) {
    const bool bad = i % 2 == 1 && i < 79;
    const std::string id = "s" + std::to_string(i);
    scores << id << ',' << (bad ? "0.5" : "0.9") << '\n';
    if (bad) expected.push_back(id);
  }
  scores << "s79,\n";
  scores.close();
  ASSERT_EQ(expected.size(), 39u);
  int code = -1;
  const std::string out = CaptureStdout(
      {"qc", "flag", "--scores", dir_.File("scores.csv"), "--out", dir_.File("flags.json")}, &code);
  ASSERT_EQ(code, kExitOk);
  std::istringstream lines(out);
  std::vector<std::string> listed;
  for (std::string l; std::getline(lines, l);) listed.push_back(l);
  EXPECT_EQ(listed, expected);
  const FlagResult r = LoadFlagResult(dir_.File("flags.json"));
  EXPECT_GT(r.threshold, 0.5);
  EXPECT_LT(r.threshold, 0.9);
  EXPECT_EQ(r.subjects.back().status, FlagStatus::kUnscored);
}

TEST_F(CliTest, QcFlagFromPredictions) {
  // Slabs of labels 1..8 along k so both sentinels are present.
  const Grid grid({6, 6, 16}, {1, 1, 1});
  std::vector<Label> slabs(grid.num_voxels());
  for (int64_t n = 0; n < grid.num_voxels(); ++n) slabs[n] = 1 + static_cast<Label>(n / 36 / 2);
  for (const ManifestEntry& e : manifest_.entries) {
    nifti::Write(LabelMap::WithDerivedVocabulary(grid, slabs), dir_.File(e.subject_id + "_seg.nii.gz"));
  }
  ASSERT_EQ(Cli({"qc", "flag", "--manifest", dir_.File("manifest.json"), "--pred",
                 dir_.File("{subject_id}_seg.nii.gz"), "--threshold", "0.7", "--out",
                 dir_.File("f.json")}),
            kExitOk);
  const json j = ReadJson(dir_.File("f.json"));
  EXPECT_EQ(j["sentinels"], json({4, 6}));
  ASSERT_EQ(j["subjects"].size(), 2u);
  for (const json& s : j["subjects"]) {
    EXPECT_DOUBLE_EQ(s["score"].get<double>(), 1.0);
    EXPECT_EQ(s["status"], "ok");
  }
}

TEST_F(CliTest, QcApplyAndExport) {
  Manifest big;
  std::ofstream ratings(dir_.File("ratings.csv"));
  ratings << kQcCsvHeader << '\n';
  for (int i = 0; i < 79; ++i) {
    const std::string id = "sub-" + std::to_string(i);
    big.entries.push_back({id, id + "_img.nii.gz", id + "_seg.nii.gz"});
    ratings << id << ',' << (i < 23 ? "bad" : "good") << ",,r1,2024-01-01T00:00:00Z,\n";
    // Older rating by another rater, later in the file: superseded.
    ratings << id << ",unrated,,r0,2023-01-01T00:00:00Z,\n";
  }
  ratings.close();
  SaveManifest(big, dir_.File("big.json"));
  ASSERT_EQ(Cli({"qc", "apply", "--manifest", dir_.File("big.json"), "--ratings",
                 dir_.File("ratings.csv"), "--select", "good", "--out", dir_.File("good.json")}),
            kExitOk);
  EXPECT_EQ(LoadManifest(dir_.File("good.json")).entries.size(), 56u);
  ASSERT_EQ(Cli({"qc", "export", "--ratings", dir_.File("ratings.csv"), "--out", dir_.File("latest.csv")}),
            kExitOk);
  const QCStore latest = ImportCsv(dir_.File("latest.csv"));
  EXPECT_EQ(latest.size(), 79u);
  EXPECT_EQ(latest.Latest(), ImportCsv(dir_.File("ratings.csv")).Latest());
  EXPECT_EQ(Cli({"qc", "apply", "--manifest", dir_.File("big.json"), "--ratings",
                 dir_.File("nope.csv"), "--out", dir_.File("x.json")}),
            kExitConfig);
}

TEST_F(CliTest, RemapSingleFile) {
  const Grid grid({4, 4, 4}, {1, 1, 1});
  std::vector<Label> aseg(grid.num_voxels(), 0);
  aseg[0] = 17;  // left hippocampus
  aseg[1] = 53;  // right hippocampus
  aseg[2] = 2;   // cerebral white matter: not a lisa class
  nifti::Write(LabelMap::WithDerivedVocabulary(grid, aseg), dir_.File("aseg.nii.gz"));
  ASSERT_EQ(Cli({"remap", "--input", dir_.File("aseg.nii.gz"), "--output", dir_.File("lisa.nii.gz"),
                 "--scheme", "lisa", "--mapping", ULFSYNTH_DATA_DIR "/mappings/aseg_to_lisa.csv"}),
            kExitOk);
  const LabelMap out = nifti::ReadLabelMap(dir_.File("lisa.nii.gz"));
  EXPECT_EQ(out[0], 1);
  EXPECT_EQ(out[1], 2);
  EXPECT_EQ(out[2], 0);
  EXPECT_EQ(Cli({"remap", "--input", dir_.File("aseg.nii.gz"), "--scheme", "lisa"}), kExitConfig);
}

}  // namespace
}  // namespace ulfsynth::cli
