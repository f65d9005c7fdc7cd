// Copyright 2026 The xsumx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xsumx/cli.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "test_util.h"
#include "xsumx/explanation.h"
#include "xsumx/io.h"

namespace xsumx {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

int RunCliCommand(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + XSUMX_CLI + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(RunCliCommand("synth --videos 3 --out " + Q(corpus())), 0);
  }
  fs::path corpus() const { return dir_ / "corpus"; }
  TempDir dir_;
};

TEST_F(CliTest, SynthWritesLoadableCorpusAndManifest) {
  EXPECT_EQ(ListCorpus(corpus()).size(), 3u);
  const Json gt = Json::parse(ReadTextFile(corpus() / "ground_truth.json"));
  EXPECT_EQ(gt.at("videos").size(), 3u);
  EXPECT_TRUE(gt.at("videos")[0].contains("planted_fragment"));
  EXPECT_TRUE(gt.at("videos")[0].contains("planted_object"));
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(RunCliCommand("synth --videos 3 --out " + Q(dir_ / "again")), 0);
  for (const auto& name : {"ground_truth.json", "video_01/frames.xsfr",
                           "video_02/features.xsfm", "video_00/segmentation.xssg"}) {
    EXPECT_EQ(ReadFileBytes(corpus() / name), ReadFileBytes(dir_ / "again" / name))
        << name;
  }
}

TEST_F(CliTest, ExplainFragmentsIsByteIdenticalAcrossRunsAndWorkers) {
  const std::string base = "explain-fragments --oracle toy-norm --seed 1 "
                           "--perturbations 500 --corpus " + Q(corpus());
  ASSERT_EQ(RunCliCommand(base + " --workers 1 --out " + Q(dir_ / "a")), 0);
  ASSERT_EQ(RunCliCommand(base + " --workers 1 --out " + Q(dir_ / "b")), 0);
  ASSERT_EQ(RunCliCommand(base + " --workers 7 --out " + Q(dir_ / "c")), 0);
  for (const char* f : {"video_00.fragments.json", "video_02.fragments.json",
                        "findings.json"}) {
    const auto a = ReadTextFile(dir_ / "a" / f);
    EXPECT_EQ(a, ReadTextFile(dir_ / "b" / f));
    EXPECT_EQ(a, ReadTextFile(dir_ / "c" / f));
  }
}

TEST_F(CliTest, OracleFromEnvironment) {
  EXPECT_EQ(RunCliCommand("explain-fragments --corpus " + Q(corpus()) + " --out " + Q(dir_ / "e"),
                "XSUMX_ORACLE=toy-attention"),
            0);
  EXPECT_EQ(RunCliCommand("explain-fragments --corpus " + Q(corpus()) + " --out " + Q(dir_ / "e"),
                "XSUMX_ORACLE="),
            2);
}

TEST_F(CliTest, MissingFeaturesIsInputError) {
  fs::create_directories(dir_ / "empty_video");
  EXPECT_EQ(RunCliCommand("explain-fragments --oracle toy-norm --video " + Q(dir_ / "empty_video") +
                " --out " + Q(dir_ / "o")),
            2);
}

TEST_F(CliTest, AttentionWithLinearOracleIsOracleError) {
  EXPECT_EQ(RunCliCommand("explain-fragments --method attention --oracle linear:0.5:0.1,0.2 "
                "--corpus " + Q(corpus()) + " --out " + Q(dir_ / "o")),
            3);
}

TEST_F(CliTest, BadSelectorsAndFlags) {
  EXPECT_EQ(RunCliCommand("explain-fragments --oracle nonsense --corpus " + Q(corpus())), 2);
  EXPECT_EQ(RunCliCommand("explain-fragments --oracle linear:x:1 --corpus " + Q(corpus())), 2);
  EXPECT_EQ(RunCliCommand("explain-fragments --oracle toy-norm --kernel cubic --corpus " +
                Q(corpus())),
            2);
  EXPECT_EQ(RunCliCommand("frobnicate"), 2);
  EXPECT_EQ(RunCliCommand("--help"), 0);
}

TEST_F(CliTest, ExecOracleSelector) {
  const std::string sel = std::string("'exec:") + XSUMX_ORACLE_SERVER + "'";
  ASSERT_EQ(RunCliCommand("explain-fragments --oracle " + sel + " --corpus " + Q(corpus()) +
                " --out " + Q(dir_ / "x")),
            0);
  ASSERT_EQ(RunCliCommand("explain-fragments --oracle toy-norm --corpus " + Q(corpus()) +
                " --out " + Q(dir_ / "y")),
            0);
  const auto x = FragmentExplanationFromJson(
      Json::parse(ReadTextFile(dir_ / "x" / "video_01.fragments.json")));
  const auto y = FragmentExplanationFromJson(
      Json::parse(ReadTextFile(dir_ / "y" / "video_01.fragments.json")));
  EXPECT_EQ(x.ranking, y.ranking);
  EXPECT_EQ(RunCliCommand("explain-fragments --oracle exec:false --corpus " + Q(corpus())), 3);
}

TEST_F(CliTest, ObjectsFromExplanationNeedFragmentsFile) {
  EXPECT_EQ(RunCliCommand("explain-objects --oracle pixel --fragments-source explanation "
                "--corpus " + Q(corpus()) + " --out " + Q(dir_ / "o")),
            2);
  ASSERT_EQ(RunCliCommand("explain-fragments --oracle pixel --corpus " + Q(corpus()) +
                " --out " + Q(dir_ / "o")),
            0);
  EXPECT_EQ(RunCliCommand("explain-objects --oracle pixel --fragments-source explanation "
                "--corpus " + Q(corpus()) + " --out " + Q(dir_ / "o")),
            0);
  std::size_t written = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "o")) {
    written += e.path().filename().string().find(".objects.") != std::string::npos;
  }
  EXPECT_GT(written, 0u);
}

TEST_F(CliTest, ObjectsWriteJsonAndOverlays) {
  ASSERT_EQ(RunCliCommand("explain-objects --oracle pixel --corpus " + Q(corpus()) + " --out " +
                Q(dir_ / "o")),
            0);
  std::size_t json = 0, png = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "o")) {
    const std::string n = e.path().filename().string();
    if (n.find(".objects.") == std::string::npos) continue;
    json += n.ends_with(".json");
    png += n.ends_with(".png");
  }
  EXPECT_EQ(json, 9u);  // three fragments per video
  EXPECT_EQ(png, 9u);
  const Json any = Json::parse(ReadTextFile(dir_ / "o" / "findings.json"));
  EXPECT_TRUE(any.is_array());
  ASSERT_EQ(RunCliCommand("render --corpus " + Q(corpus()) + " --explanations " + Q(dir_ / "o") +
                " --out " + Q(dir_ / "r")),
            0);
  for (const auto& e : fs::directory_iterator(dir_ / "o")) {
    const std::string n = e.path().filename().string();
    if (n.ends_with(".png")) {
      EXPECT_EQ(ReadFileBytes(e.path()), ReadFileBytes(dir_ / "r" / n));
    }
  }
}

TEST_F(CliTest, NoSegmentationAnywhereMeansEmptyOutputAndFindings) {
  for (const auto& name : ListCorpus(corpus())) {
    fs::remove(corpus() / name / kSegmentationFile);
  }
  ASSERT_EQ(RunCliCommand("explain-objects --oracle pixel --corpus " + Q(corpus()) + " --out " +
                Q(dir_ / "o")),
            0);
  const Json findings = Json::parse(ReadTextFile(dir_ / "o" / "findings.json"));
  EXPECT_EQ(findings.size(), 3u);
  for (const auto& e : fs::directory_iterator(dir_ / "o")) {
    EXPECT_EQ(e.path().filename().string().find(".objects."), std::string::npos);
  }
}

TEST_F(CliTest, ThreeObjectKeyframeIsExhaustive) {
  // Keep three labels: collapse every other object into the void.
  for (const auto& name : ListCorpus(corpus())) {
    const fs::path p = corpus() / name / kSegmentationFile;
    const SegmentationMaps seg = LoadSegmentation(p);
    std::vector<ObjectId> labels(seg.labels().begin(), seg.labels().end());
    std::vector<ObjectId> keep;
    for (ObjectId id : labels) {
      if (id != 0 && std::find(keep.begin(), keep.end(), id) == keep.end() &&
          keep.size() < 3) {
        keep.push_back(id);
      }
    }
    for (ObjectId& id : labels) {
      if (std::find(keep.begin(), keep.end(), id) == keep.end()) id = 0;
    }
    SaveSegmentation(SegmentationMaps(seg.n_frames(), seg.height(), seg.width(), labels),
                     p);
  }
  ASSERT_EQ(RunCliCommand("explain-objects --oracle pixel --corpus " + Q(corpus()) + " --out " +
                Q(dir_ / "o")),
            0);
  for (const auto& e : fs::directory_iterator(dir_ / "o")) {
    if (!e.path().string().ends_with(".json") ||
        e.path().filename().string().find(".objects.") == std::string::npos) {
      continue;
    }
    const Json j = Json::parse(ReadTextFile(e.path()));
    EXPECT_EQ(j.at("diagnostics").at("perturbations"), 8);
    EXPECT_EQ(j.at("diagnostics").at("exhaustive"), true);
  }
}

TEST_F(CliTest, EvaluateWritesReportFiles) {
  ASSERT_EQ(RunCliCommand("explain-fragments --oracle toy-norm --corpus " + Q(corpus()) +
                " --out " + Q(dir_ / "o")),
            0);
  ASSERT_EQ(RunCliCommand("evaluate --oracle toy-norm --corpus " + Q(corpus()) + " --out " +
                Q(dir_ / "o") + " --workers 3"),
            0);
  const Json report = Json::parse(ReadTextFile(dir_ / "o" / "report.json"));
  EXPECT_EQ(report.at("level"), "fragments");
  const std::string txt = ReadTextFile(dir_ / "o" / "report.txt");
  EXPECT_NE(txt.find("Disc+ (↓)"), std::string::npos);
  EXPECT_EQ(RunCliCommand("evaluate --oracle toy-norm --corpus " + Q(corpus()) +
                " --level objects --out " + Q(dir_ / "o")),
            2);  // no object explanations yet
}

}  // namespace
}  // namespace xsumx
