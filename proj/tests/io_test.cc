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

#include "xsumx/io.h"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>

#include "test_util.h"
#include "xsumx/bundle.h"

namespace xsumx {
namespace {

using testing::TempDir;

std::vector<std::uint8_t> U32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
}

std::vector<std::uint8_t> F32(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return U32(u);
}

std::vector<std::uint8_t> FeatureFile(const char* magic, std::uint32_t version,
                                      std::uint32_t n, std::uint32_t dim,
                                      const std::vector<float>& values) {
  std::vector<std::uint8_t> out(magic, magic + 4);
  for (auto part : {U32(version), U32(n), U32(dim)}) {
    out.insert(out.end(), part.begin(), part.end());
  }
  for (float v : values) {
    const auto b = F32(v);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

TEST(FeaturesFile, DecodesHandBuiltHeader) {
  TempDir dir;
  const auto path = dir / "f.xsfm";
  WriteFileBytes(path, FeatureFile("XSFM", 1, 3, 2, {1, 2, 3, 4, 5, 6}));
  const FrameFeatures f = LoadFeatures(path);
  ASSERT_EQ(f.n_frames(), 3u);
  ASSERT_EQ(f.dim(), 2u);
  EXPECT_EQ(f.row(2)[0], 5.0f);
  EXPECT_EQ(f.row(2)[1], 6.0f);
}

TEST(FeaturesFile, RejectsBadMagicAtOffsetZero) {
  TempDir dir;
  const auto path = dir / "f.xsfm";
  WriteFileBytes(path, FeatureFile("XXXX", 1, 1, 1, {1}));
  try {
    LoadFeatures(path);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(FeaturesFile, RejectsTruncationTrailingBytesAndVersion) {
  TempDir dir;
  const auto path = dir / "f.xsfm";
  auto bytes = FeatureFile("XSFM", 1, 2, 2, {1, 2, 3, 4});
  bytes.pop_back();
  WriteFileBytes(path, bytes);
  EXPECT_THROW(LoadFeatures(path), FormatError);

  bytes = FeatureFile("XSFM", 1, 2, 2, {1, 2, 3, 4});
  bytes.push_back(0);
  WriteFileBytes(path, bytes);
  EXPECT_THROW(LoadFeatures(path), FormatError);

  WriteFileBytes(path, FeatureFile("XSFM", 2, 1, 1, {1}));
  EXPECT_THROW(LoadFeatures(path), FormatError);
}

TEST(FeaturesFile, ReportsOffsetOfNonFiniteValue) {
  TempDir dir;
  const auto path = dir / "f.xsfm";
  WriteFileBytes(path, FeatureFile("XSFM", 1, 2, 1,
                                   {1.0f, std::numeric_limits<float>::quiet_NaN()}));
  try {
    LoadFeatures(path);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 20u);
  }
}

TEST(FeaturesFile, RoundTripIsByteExactOnRandomMatrices) {
  TempDir dir;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  std::normal_distribution<float> value(0.0f, 3.0f);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = size(rng), dim = size(rng);
    std::vector<float> data(n * dim);
    for (float& v : data) v = value(rng);
    const auto p1 = dir / ("a" + std::to_string(t));
    const auto p2 = dir / ("b" + std::to_string(t));
    SaveFeatures(FrameFeatures(n, dim, data), p1);
    SaveFeatures(LoadFeatures(p1), p2);
    EXPECT_EQ(ReadFileBytes(p1), ReadFileBytes(p2));
    EXPECT_EQ(ReadFileBytes(p1).size(), 16 + 4 * n * dim);
  }
}

TEST(SegmentationFile, RoundTrip) {
  TempDir dir;
  std::vector<ObjectId> labels(2 * 3 * 4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<ObjectId>(i * 2731);
  }
  const SegmentationMaps maps(2, 3, 4, labels);
  SaveSegmentation(maps, dir / "s");
  EXPECT_EQ(LoadSegmentation(dir / "s"), maps);
  const auto bytes = ReadFileBytes(dir / "s");
  ASSERT_EQ(bytes.size(), 20 + 2 * labels.size());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "XSSG");
  EXPECT_EQ(bytes[20 + 2], 2731 & 0xff);  // little endian
  EXPECT_EQ(bytes[20 + 3], 2731 >> 8);
}

TEST(FramesFile, RoundTrip) {
  TempDir dir;
  std::vector<std::uint8_t> px(3 * 2 * 2 * 3);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(i * 7);
  const RgbFrames frames(3, 2, 2, px);
  SaveFrames(frames, dir / "r");
  EXPECT_EQ(LoadFrames(dir / "r"), frames);
  SaveFrames(LoadFrames(dir / "r"), dir / "r2");
  EXPECT_EQ(ReadFileBytes(dir / "r"), ReadFileBytes(dir / "r2"));
}

TEST(FragmentsFile, ValidPartition) {
  TempDir dir;
  WriteTextFile(dir / "f.json", "[[0,4],[5,9]]");
  const Fragmentation f = LoadFragments(dir / "f.json", 10);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[1].start, 5u);
  EXPECT_EQ(f[1].end, 9u);
}

TEST(FragmentsFile, GapIsReported) {
  TempDir dir;
  WriteTextFile(dir / "f.json", "[[0,4],[6,9]]");
  try {
    LoadFragments(dir / "f.json", 10);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("gap after fragment 0"),
              std::string::npos);
  }
}

TEST(FragmentsFile, OverlapIsReported) {
  TempDir dir;
  WriteTextFile(dir / "f.json", "[[0,6],[5,9]]");
  try {
    LoadFragments(dir / "f.json", 10);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("overlap"), std::string::npos);
  }
}

TEST(FragmentsFile, RoundTrip) {
  TempDir dir;
  WriteTextFile(dir / "f.json", "[[0,2],[3,3],[4,9]]\n");
  SaveFragments(LoadFragments(dir / "f.json", 10), dir / "g.json");
  EXPECT_EQ(ReadTextFile(dir / "f.json"), ReadTextFile(dir / "g.json"));
}

TEST(FragmentsFile, MalformedJsonIsFormatError) {
  TempDir dir;
  WriteTextFile(dir / "f.json", "[[0,4],");
  EXPECT_THROW(LoadFragments(dir / "f.json", 5), FormatError);
  WriteTextFile(dir / "f.json", "[[0,4,7]]");
  EXPECT_ANY_THROW(LoadFragments(dir / "f.json", 5));
}

TEST(Bundle, LoadsDirectoryAndFallsBackToDetectedShots) {
  TempDir dir;
  const auto vdir = dir / "vid";
  std::filesystem::create_directories(vdir);
  SaveFeatures(FrameFeatures(24, 2, std::vector<float>(48, 1.0f)),
               vdir / kFeaturesFile);
  VideoBundle b = LoadBundle(vdir);
  EXPECT_EQ(b.video_id, "vid");
  EXPECT_EQ(b.fragmentation.size(), 12u);  // one shot, subdivided
  EXPECT_FALSE(b.frames);
  EXPECT_TRUE(ValidateBundle(b).empty());

  WriteTextFile(vdir / kFragmentsFile, "[[0,11],[12,23]]");
  b = LoadBundle(vdir);
  EXPECT_EQ(b.fragmentation.size(), 2u);
  EXPECT_EQ(ListCorpus(dir.path()), std::vector<std::string>{"vid"});
}

TEST(Bundle, MissingFeaturesIsValidationError) {
  TempDir dir;
  EXPECT_THROW(LoadBundle(dir / "nothing"), ValidationError);
}

TEST(Bundle, ValidatorFlagsMismatches) {
  VideoBundle b = testing::UniformBundle(2, 5);
  EXPECT_TRUE(ValidateBundle(b).empty());

  b.segmentation = std::make_shared<const SegmentationMaps>(
      9, 1, 1, std::vector<ObjectId>(9, 1));
  EXPECT_EQ(ValidateBundle(b).size(), 1u);

  VideoBundle c = testing::UniformBundle(2, 5);
  c.fragmentation = Fragmentation({{0, 4}, {5, 8}}, 9);
  EXPECT_EQ(ValidateBundle(c).size(), 1u);
}

TEST(Types, FragmentationLengthsSumToFrameCount) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<Fragment> frags;
    std::size_t start = 0;
    const std::size_t count = 1 + rng() % 10;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t len = 1 + rng() % 7;
      frags.push_back({start, start + len - 1});
      start += len;
    }
    const Fragmentation f(frags, start);
    std::size_t total = 0;
    for (const Fragment& x : f.fragments()) total += x.length();
    EXPECT_EQ(total, start);
    for (std::size_t i = 0; i < start; ++i) {
      EXPECT_TRUE(f[f.FragmentOf(i)].Contains(i));
    }
  }
}

TEST(Types, SpecFactoriesSortAndDedupe) {
  const auto s = PerturbationSpec::Fragments({3, 1, 3, 0});
  EXPECT_EQ(s.masked_fragments, (std::vector<std::size_t>{0, 1, 3}));
  const auto o = PerturbationSpec::Objects(2, {9, 4, 9});
  EXPECT_EQ(o.masked_objects, (std::vector<ObjectId>{4, 9}));
  EXPECT_EQ(o.target_fragment, 2u);
}

TEST(Types, ObjectSpecWithoutSegmentationIsRejected) {
  const VideoBundle b = testing::UniformBundle(2, 3);
  EXPECT_THROW(ValidateSpec(PerturbationSpec::Objects(0, {1}), b),
               ValidationError);
  EXPECT_THROW(ValidateSpec(PerturbationSpec::Fragments({2}), b),
               ValidationError);
  EXPECT_NO_THROW(ValidateSpec(PerturbationSpec::Fragments({1}), b));
}

TEST(Types, OutOfRangeScoresWarnOnly) {
  Findings findings;
  EXPECT_TRUE(CheckScores({0.5, 1.2, -0.1}, 3, &findings));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_NE(findings[0].message.find("2 score(s)"), std::string::npos);
  EXPECT_FALSE(CheckScores({0.5}, 3, &findings));
}

}  // namespace
}  // namespace xsumx
