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

#ifndef XSUMX_TOY_ORACLES_H_
#define XSUMX_TOY_ORACLES_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "xsumx/oracle.h"

namespace xsumx {

// frame score = clamp(base - sum of weights of masked fragments
//                     + frame_slope * frame_index, 0, 1).
// The score is exactly linear in the fragment-mask indicator as long as the
// clamp stays inactive. A non-zero slope gives every frame a distinct rank.
class LinearMaskOracle : public Oracle {
 public:
  LinearMaskOracle(double base, std::vector<double> fragment_weights,
                   double frame_slope = 0.0);

  OracleCapabilities capabilities() const override;

  double base() const { return base_; }
  const std::vector<double>& weights() const { return weights_; }

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;

 private:
  double base_;
  std::vector<double> weights_;
  double frame_slope_;
};

// Self-attention stand-in. With F the (masked) feature matrix,
//   A = row_softmax(F F^T / sqrt(dim)),
//   s_j = |f_j| / max_k |f_k|   (0 when every row is zero),
//   score_i = sum_j A_ij s_j.
// Masked frames are zero rows. Attention() reports diag(A) of the
// unperturbed video.
class ToyAttentionScorer : public Oracle {
 public:
  OracleCapabilities capabilities() const override;

  // Full attention matrix, row-major n x n. Exposed for tests.
  static std::vector<double> AttentionMatrix(const FrameFeatures& features);
  static ScoreSequence ScoreFeatures(const FrameFeatures& features);

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;
  AttentionDiagonal DoAttention(const VideoBundle& bundle) const override;
};

// Feature-norm scorer shared with the reference oracle server:
//   s_j = |f_j| / max_k |g_k|  where g are the UNPERTURBED features
//         (0 when every unperturbed row is zero), masked rows zeroed first;
//   score_i = mean of s_j over j in [i - window/2, i + window/2] clipped to
//             the video.
// Because the normalizer ignores the mask, the mean score is linear in the
// fragment-mask bits.
class NormSmoothOracle : public Oracle {
 public:
  explicit NormSmoothOracle(std::size_t window = 5);

  OracleCapabilities capabilities() const override;

  static ScoreSequence ScoreFeatures(const FrameFeatures& features,
                                     double normalizer, std::size_t window);
  static double MaxNorm(const FrameFeatures& features);

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;

 private:
  std::size_t window_;
};

// score_i = clamp(mean of row i, 0, 1). Intended as the inner scorer of a
// PixelOracle over mean-colour features.
class MeanFeatureScorer : public Oracle {
 public:
  OracleCapabilities capabilities() const override;

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;
};

// Per-frame pixel -> feature map.
struct FeatureExtractor {
  std::size_t dim = 0;
  // (rgb frame, height, width) -> dim values.
  std::function<std::vector<float>(std::span<const std::uint8_t>, std::size_t,
                                   std::size_t)>
      extract;
};

// Mean RGB per cell of a grid x grid layout, scaled to [0,1]. Feature index
// of (cell_row, cell_col, channel) is (cell_row * grid + cell_col) * 3 + ch.
// Cell r spans rows [r*H/grid, (r+1)*H/grid).
FeatureExtractor GridMeanExtractor(std::size_t grid = 4);

FrameFeatures ExtractFeatures(const FeatureExtractor& extractor,
                              const RgbFrames& frames);

// Perturbs pixels, re-extracts features and asks `inner` to score them.
// Fragment masks black out whole frames; object masks black out the pixels
// of the given IDs in every frame of the target fragment.
class PixelOracle : public Oracle {
 public:
  PixelOracle(FeatureExtractor extractor, std::shared_ptr<const Oracle> inner);

  OracleCapabilities capabilities() const override;

  // Features the inner oracle sees for `spec`.
  FrameFeatures PerturbedFeatures(const VideoBundle& bundle,
                                  const PerturbationSpec& spec) const;

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;
  AttentionDiagonal DoAttention(const VideoBundle& bundle) const override;

 private:
  std::shared_ptr<const FrameFeatures> BaselineFeatures(
      const VideoBundle& bundle) const;

  FeatureExtractor extractor_;
  std::shared_ptr<const Oracle> inner_;

  // Baseline extraction per frames buffer. Entries hold a reference to the
  // buffer so its address stays unique while cached.
  struct CacheEntry {
    std::shared_ptr<const RgbFrames> frames;
    std::shared_ptr<const FrameFeatures> features;
  };
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<const RgbFrames*, CacheEntry> cache_;
};

std::shared_ptr<const Oracle> MakeLinearMaskOracle(
    double base, std::vector<double> fragment_weights,
    double frame_slope = 0.0);
std::shared_ptr<const Oracle> MakeToyAttentionScorer();
std::shared_ptr<const Oracle> MakeNormSmoothOracle(std::size_t window = 5);
std::shared_ptr<const Oracle> MakePixelOracle(
    FeatureExtractor extractor, std::shared_ptr<const Oracle> inner);

}  // namespace xsumx

#endif  // XSUMX_TOY_ORACLES_H_
