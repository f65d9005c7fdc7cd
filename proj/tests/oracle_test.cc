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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_util.h"
#include "xsumx/oracle.h"
#include "xsumx/toy_oracles.h"

namespace xsumx {
namespace {

using testing::MakeBundle;
using testing::Rows;
using testing::UniformBundle;

TEST(LinearMaskOracle, ClosedForm) {
  const VideoBundle b = UniformBundle(2, 3);
  const LinearMaskOracle oracle(0.8, {0.3, 0.1});
  for (double v : oracle.Score(b, PerturbationSpec::None())) {
    EXPECT_DOUBLE_EQ(v, 0.8);
  }
  for (double v : oracle.Score(b, PerturbationSpec::Fragments({0, 1}))) {
    EXPECT_NEAR(v, 0.4, 1e-15);
  }
  for (double v : oracle.Score(b, PerturbationSpec::Fragments({0}))) {
    EXPECT_NEAR(v, 0.8 - 0.3, 1e-15);
  }
}

TEST(LinearMaskOracle, Clamps) {
  const LinearMaskOracle oracle(0.2, {0.5});
  for (double v : oracle.Score(UniformBundle(1, 4), PerturbationSpec::Fragments({0}))) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(LinearMaskOracle, WeightCountMustMatchFragments) {
  const LinearMaskOracle oracle(0.5, {0.1, 0.1, 0.1});
  EXPECT_THROW(oracle.Score(UniformBundle(2, 2), PerturbationSpec::None()),
               OracleError);
}

TEST(LinearMaskOracle, NoAttentionNoObjects) {
  const LinearMaskOracle oracle(0.5, {0.1});
  EXPECT_THROW(oracle.Attention(UniformBundle(1, 2)), OracleError);
  EXPECT_FALSE(oracle.capabilities().object_masks);
}

TEST(LinearMaskOracle, MonotoneUnderMaskNesting) {
  std::mt19937_64 rng(2);
  const std::vector<double> w{0.05, 0.02, 0.0, 0.07, 0.01};
  const LinearMaskOracle oracle(0.6, w);
  const VideoBundle b = UniformBundle(5, 2);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::size_t> a, bigger;
    for (std::size_t k = 0; k < 5; ++k) {
      const auto r = rng() % 3;
      if (r == 0) a.push_back(k);
      if (r != 2) bigger.push_back(k);
    }
    if (a.empty()) continue;
    const auto sa = oracle.Score(b, PerturbationSpec::Fragments(a));
    const auto sb = oracle.Score(b, PerturbationSpec::Fragments(bigger));
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_GE(sa[i], sb[i]);
  }
}

TEST(LinearMaskOracle, FrameSlopeAddsIndexTerm) {
  const LinearMaskOracle oracle(0.5, {0.1, 0.2}, 0.001);
  const auto s = oracle.Score(UniformBundle(2, 2), PerturbationSpec::Fragments({1}));
  EXPECT_NEAR(s[3], 0.5 - 0.2 + 0.003, 1e-15);
}

TEST(Oracle, ObjectSpecWithoutSegmentationFails) {
  const auto oracle = MakePixelOracle(GridMeanExtractor(1),
                                      std::make_shared<MeanFeatureScorer>());
  EXPECT_THROW(oracle->Score(UniformBundle(2, 2), PerturbationSpec::Objects(0, {1})),
               std::runtime_error);
}

TEST(Oracle, ScoringIsDeterministic) {
  std::mt19937_64 rng(8);
  std::vector<float> data(40);
  for (float& v : data) v = static_cast<float>(rng() % 100) / 10.0f;
  const VideoBundle b = MakeBundle(FrameFeatures(10, 4, data), {{0, 4}, {5, 9}});
  for (const auto& oracle : {MakeToyAttentionScorer(), MakeNormSmoothOracle()}) {
    EXPECT_EQ(oracle->Score(b, PerturbationSpec::None()),
              oracle->Score(b, PerturbationSpec::None()));
  }
}

TEST(ToyAttention, SingleFrame) {
  const VideoBundle b = MakeBundle(Rows({{0.3f, 0.4f}}), {{0, 0}});
  const ToyAttentionScorer oracle;
  EXPECT_EQ(oracle.Attention(b), (AttentionDiagonal{1.0}));
  EXPECT_DOUBLE_EQ(oracle.Score(b, PerturbationSpec::None())[0], 1.0);
}

TEST(ToyAttention, IdenticalRowsGiveUniformAttention) {
  const std::size_t n = 7;
  const VideoBundle b =
      MakeBundle(FrameFeatures(n, 3, std::vector<float>(3 * n, 0.5f)), {{0, n - 1}});
  const ToyAttentionScorer oracle;
  for (double d : oracle.Attention(b)) EXPECT_NEAR(d, 1.0 / n, 1e-15);
  const auto s = oracle.Score(b, PerturbationSpec::None());
  for (double v : s) EXPECT_NEAR(v, s[0], 1e-15);
}

TEST(ToyAttention, ScoresMatchDenseMatrixWithZeroedRows) {
  std::mt19937_64 rng(22);
  std::normal_distribution<float> g(0.0f, 1.0f);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + rng() % 20, d = 6;
    std::vector<float> data(n * d);
    for (float& v : data) v = g(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) std::fill_n(data.begin() + i * d, d, 0.0f);
    }
    const FrameFeatures f(n, d, data);
    const std::vector<double> a = ToyAttentionScorer::AttentionMatrix(f);
    std::vector<double> norm(n);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (float v : f.row(i)) norm[i] += double{v} * v;
      norm[i] = std::sqrt(norm[i]);
      max_norm = std::max(max_norm, norm[i]);
    }
    const ScoreSequence s = ToyAttentionScorer::ScoreFeatures(f);
    for (std::size_t i = 0; i < n; ++i) {
      double want = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        want += a[i * n + j] * (max_norm > 0.0 ? norm[j] / max_norm : 0.0);
      }
      EXPECT_NEAR(s[i], std::clamp(want, 0.0, 1.0), 1e-12);
    }
  }
}

TEST(ToyAttention, MatchesDirectSoftmax) {
  std::mt19937_64 rng(21);
  std::normal_distribution<float> g(0.0f, 1.0f);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3, d = 4;
    std::vector<float> data(n * d);
    for (float& v : data) v = g(rng);
    const FrameFeatures f(n, d, data);

    double a[3][3];
    for (std::size_t i = 0; i < n; ++i) {
      double logits[3], mx = -1e300;
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0;
        for (std::size_t c = 0; c < d; ++c) dot += double{data[i * d + c]} * data[j * d + c];
        logits[j] = dot / std::sqrt(static_cast<double>(d));
        mx = std::max(mx, logits[j]);
      }
      double z = 0;
      for (std::size_t j = 0; j < n; ++j) z += std::exp(logits[j] - mx);
      for (std::size_t j = 0; j < n; ++j) a[i][j] = std::exp(logits[j] - mx) / z;
    }
    double norms[3], max_norm = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double sq = 0;
      for (std::size_t c = 0; c < d; ++c) sq += double{data[j * d + c]} * data[j * d + c];
      norms[j] = std::sqrt(sq);
      max_norm = std::max(max_norm, norms[j]);
    }
    const auto matrix = ToyAttentionScorer::AttentionMatrix(f);
    const auto scores = ToyAttentionScorer::ScoreFeatures(f);
    for (std::size_t i = 0; i < n; ++i) {
      double expected = 0, row_sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(matrix[i * n + j], a[i][j], 1e-12);
        expected += a[i][j] * norms[j] / max_norm;
        row_sum += matrix[i * n + j];
      }
      EXPECT_NEAR(row_sum, 1.0, 1e-9);
      EXPECT_NEAR(scores[i], std::clamp(expected, 0.0, 1.0), 1e-12);
    }
  }
}

TEST(NormSmooth, ZeroFeaturesGiveZeroScores) {
  const VideoBundle b = MakeBundle(FrameFeatures(6, 2, std::vector<float>(12, 0)),
                                   {{0, 2}, {3, 5}});
  for (double v : NormSmoothOracle().Score(b, PerturbationSpec::None())) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(NormSmooth, MaskingEverythingGivesZeroScores) {
  const VideoBundle b = UniformBundle(1, 8);
  for (double v : NormSmoothOracle().Score(b, PerturbationSpec::Fragments({0}))) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(NormSmooth, MovingAverageOfNormalizedNorms) {
  const VideoBundle b = MakeBundle(Rows({{1, 0}, {2, 0}, {3, 0}, {0, 4}, {5, 0}, {0, 0}}),
                                   {{0, 2}, {3, 5}});
  const auto s = NormSmoothOracle(5).Score(b, PerturbationSpec::None());
  const double n[6] = {0.2, 0.4, 0.6, 0.8, 1.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    double sum = 0;
    int cnt = 0;
    for (int j = std::max(0, i - 2); j <= std::min(5, i + 2); ++j) {
      sum += n[j];
      ++cnt;
    }
    EXPECT_NEAR(s[i], sum / cnt, 1e-12);
  }
  // Masked frames are zeroed; the normalizer stays that of the full video.
  const auto m = NormSmoothOracle(1).Score(b, PerturbationSpec::Fragments({1}));
  EXPECT_NEAR(m[0], 0.2, 1e-12);
  EXPECT_EQ(m[4], 0.0);
}

RgbFrames BlockFrames(std::size_t n, std::size_t h, std::size_t w) {
  std::vector<std::uint8_t> px(n * h * w * 3);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<std::uint8_t>((i * 37 + i / 97) % 251);
  }
  return RgbFrames(n, h, w, std::move(px));
}

VideoBundle PixelBundle(std::size_t n, std::size_t h, std::size_t w,
                        std::vector<ObjectId> one_frame_labels) {
  auto frames = std::make_shared<const RgbFrames>(BlockFrames(n, h, w));
  std::vector<ObjectId> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.insert(labels.end(), one_frame_labels.begin(), one_frame_labels.end());
  }
  VideoBundle b{.video_id = "p",
                .features = ExtractFeatures(GridMeanExtractor(2), *frames),
                .fragmentation = Fragmentation({{0, n / 2 - 1}, {n / 2, n - 1}}, n),
                .frames = frames,
                .segmentation = std::make_shared<const SegmentationMaps>(
                    n, h, w, std::move(labels)),
                .paths = {}};
  return b;
}

TEST(PixelOracle, BlackVideoHasZeroFeatures) {
  const RgbFrames black(2, 4, 4, std::vector<std::uint8_t>(2 * 4 * 4 * 3, 0));
  const FrameFeatures f = ExtractFeatures(GridMeanExtractor(2), black);
  for (std::size_t i = 0; i < 2; ++i) {
    for (float v : f.row(i)) EXPECT_EQ(v, 0.0f);
  }
}

TEST(PixelOracle, GridMeanLayout) {
  const RgbFrames frames = BlockFrames(1, 4, 4);
  const FrameFeatures f = ExtractFeatures(GridMeanExtractor(2), frames);
  ASSERT_EQ(f.dim(), 12u);
  // Cell (1, 0) = rows 2..3, cols 0..1, channel 2.
  double sum = 0;
  for (std::size_t y = 2; y < 4; ++y) {
    for (std::size_t x = 0; x < 2; ++x) sum += frames.frame(0)[(y * 4 + x) * 3 + 2];
  }
  EXPECT_NEAR(f.row(0)[(1 * 2 + 0) * 3 + 2], sum / 4 / 255.0, 1e-6);
}

TEST(PixelOracle, MaskingOneCellObjectChangesThatCellOnly) {
  // 4x4 frame, grid 2: object 5 is exactly cell (0, 1).
  std::vector<ObjectId> labels(16, 1);
  for (std::size_t y = 0; y < 2; ++y) {
    for (std::size_t x = 2; x < 4; ++x) labels[y * 4 + x] = 5;
  }
  const VideoBundle b = PixelBundle(4, 4, 4, labels);
  const PixelOracle oracle(GridMeanExtractor(2), std::make_shared<MeanFeatureScorer>());
  const FrameFeatures base = oracle.PerturbedFeatures(b, PerturbationSpec::None());
  const FrameFeatures masked =
      oracle.PerturbedFeatures(b, PerturbationSpec::Objects(1, {5}));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t d = 0; d < 12; ++d) {
      const bool in_cell = d >= 3 && d < 6;
      const bool in_fragment = i >= 2;
      if (in_cell && in_fragment) {
        EXPECT_EQ(masked.row(i)[d], 0.0f);
      } else {
        EXPECT_EQ(masked.row(i)[d], base.row(i)[d]) << i << "," << d;
      }
    }
  }
}

TEST(PixelOracle, AbsentObjectIsNoOp) {
  const VideoBundle b = PixelBundle(4, 4, 4, std::vector<ObjectId>(16, 1));
  const auto oracle = MakePixelOracle(GridMeanExtractor(2),
                                      std::make_shared<MeanFeatureScorer>());
  EXPECT_EQ(oracle->Score(b, PerturbationSpec::Objects(0, {9})),
            oracle->Score(b, PerturbationSpec::None()));
}

TEST(PixelOracle, UnperturbedEqualsInnerOnExtractedFeatures) {
  const VideoBundle b = PixelBundle(6, 4, 4, std::vector<ObjectId>(16, 1));
  const auto inner = MakeNormSmoothOracle();
  const auto oracle = MakePixelOracle(GridMeanExtractor(2), inner);
  EXPECT_EQ(oracle->Score(b, PerturbationSpec::None()),
            inner->Score(b, PerturbationSpec::None()));
}

TEST(PixelOracle, FragmentMaskUsesBlackFrames) {
  const VideoBundle b = PixelBundle(6, 4, 4, std::vector<ObjectId>(16, 1));
  const auto inner = MakeNormSmoothOracle();
  const auto oracle = MakePixelOracle(GridMeanExtractor(2), inner);
  EXPECT_EQ(oracle->Score(b, PerturbationSpec::Fragments({0})),
            inner->Score(b, PerturbationSpec::Fragments({0})));
}

TEST(MaskedFeatures, ZeroesMaskedRows) {
  const VideoBundle b = UniformBundle(3, 2);
  const FrameFeatures f = MaskedFeatures(b, PerturbationSpec::Fragments({1}));
  for (std::size_t i = 0; i < 6; ++i) {
    const float expected = (i == 2 || i == 3) ? 0.0f : 1.0f;
    for (float v : f.row(i)) EXPECT_EQ(v, expected);
  }
  EXPECT_THROW(MaskedFeatures(b, PerturbationSpec::Objects(0, {1})), OracleError);
}

}  // namespace
}  // namespace xsumx
