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

#include "xsumx/toy_oracles.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace xsumx {
namespace {

constexpr std::size_t kMaxCachedVideos = 64;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> RowNorms(const FrameFeatures& features) {
  std::vector<double> norms(features.n_frames());
  for (std::size_t i = 0; i < features.n_frames(); ++i) {
    double sq = 0.0;
    for (float v : features.row(i)) sq += double{v} * v;
    norms[i] = std::sqrt(sq);
  }
  return norms;
}

VideoBundle WithFeatures(const VideoBundle& bundle, FrameFeatures features) {
  VideoBundle out{
      .video_id = bundle.video_id,
      .features = std::move(features),
      .fragmentation = bundle.fragmentation,
      .frames = bundle.frames,
      .segmentation = bundle.segmentation,
      .paths = bundle.paths,
  };
  return out;
}

}  // namespace

// LinearMaskOracle

LinearMaskOracle::LinearMaskOracle(double base,
                                   std::vector<double> fragment_weights,
                                   double frame_slope)
    : base_(base), weights_(std::move(fragment_weights)),
      frame_slope_(frame_slope) {
  if (!std::isfinite(base_) || !std::isfinite(frame_slope_)) {
    throw ValidationError("linear oracle: non-finite parameter");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw ValidationError("linear oracle: non-finite fragment weight");
    }
  }
}

OracleCapabilities LinearMaskOracle::capabilities() const {
  return {.fragment_masks = true, .batch_limit = 1};
}

ScoreSequence LinearMaskOracle::DoScore(const VideoBundle& bundle,
                                        const PerturbationSpec& spec) const {
  if (bundle.fragmentation.size() != weights_.size()) {
    throw OracleError("linear oracle has " + std::to_string(weights_.size()) +
                      " fragment weights, video " + bundle.video_id +
                      " has " + std::to_string(bundle.fragmentation.size()) +
                      " fragments");
  }
  double level = base_;
  for (std::size_t k : spec.masked_fragments) level -= weights_[k];
  ScoreSequence scores(bundle.n_frames());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = Clamp01(level + frame_slope_ * static_cast<double>(i));
  }
  return scores;
}

// ToyAttentionScorer

OracleCapabilities ToyAttentionScorer::capabilities() const {
  return {.fragment_masks = true, .attention = true, .batch_limit = 1};
}

std::vector<double> ToyAttentionScorer::AttentionMatrix(
    const FrameFeatures& features) {
  const std::size_t n = features.n_frames();
  const double scale = 1.0 / std::sqrt(static_cast<double>(features.dim()));
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fi = features.row(i);
    double row_max = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      const auto fj = features.row(j);
      double dot = 0.0;
      for (std::size_t d = 0; d < fi.size(); ++d) dot += double{fi[d]} * fj[d];
      a[i * n + j] = dot * scale;
      row_max = std::max(row_max, a[i * n + j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = std::exp(a[i * n + j] - row_max);
      sum += a[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= sum;
  }
  return a;
}

// Same result as AttentionMatrix times the norm vector. All-zero rows have
// logit 0 against every frame, so they are folded in without the full n x n.
ScoreSequence ToyAttentionScorer::ScoreFeatures(const FrameFeatures& features) {
  const std::size_t n = features.n_frames();
  const std::size_t dim = features.dim();
  const std::vector<double> norms = RowNorms(features);
  const double max_norm = *std::max_element(norms.begin(), norms.end());
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] > 0.0) live.push_back(i);
  }
  const std::size_t k = live.size();
  const double zeros = static_cast<double>(n - k);
  ScoreSequence scores(n, 0.0);
  if (k == 0) return scores;

  Eigen::MatrixXd x(k, dim);
  Eigen::VectorXd s(k);
  for (std::size_t r = 0; r < k; ++r) {
    const auto row = features.row(live[r]);
    for (std::size_t d = 0; d < dim; ++d) x(r, d) = row[d];
    s(r) = norms[live[r]] / max_norm;
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd logits = (x * x.transpose()) * scale;
  // A zero row attends uniformly over all n frames.
  const double uniform = Clamp01(s.sum() / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) scores[i] = uniform;
  }
  for (std::size_t r = 0; r < k; ++r) {
    auto col = logits.col(r);
    double m = col.maxCoeff();
    if (zeros > 0.0) m = std::max(m, 0.0);
    const Eigen::ArrayXd e = (col.array() - m).exp();
    const double sum = e.sum() + zeros * std::exp(-m);
    scores[live[r]] = Clamp01((e * s.array()).sum() / sum);
  }
  return scores;
}

ScoreSequence ToyAttentionScorer::DoScore(const VideoBundle& bundle,
                                          const PerturbationSpec& spec) const {
  return ScoreFeatures(MaskedFeatures(bundle, spec));
}

AttentionDiagonal ToyAttentionScorer::DoAttention(
    const VideoBundle& bundle) const {
  const std::size_t n = bundle.n_frames();
  const std::vector<double> a = AttentionMatrix(bundle.features);
  AttentionDiagonal diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a[i * n + i];
  return diag;
}

// NormSmoothOracle

NormSmoothOracle::NormSmoothOracle(std::size_t window) : window_(window) {
  if (window_ == 0) throw ValidationError("norm oracle: window must be >= 1");
}

OracleCapabilities NormSmoothOracle::capabilities() const {
  return {.fragment_masks = true, .batch_limit = 1};
}

double NormSmoothOracle::MaxNorm(const FrameFeatures& features) {
  const std::vector<double> norms = RowNorms(features);
  return *std::max_element(norms.begin(), norms.end());
}

ScoreSequence NormSmoothOracle::ScoreFeatures(const FrameFeatures& features,
                                              double normalizer,
                                              std::size_t window) {
  const std::size_t n = features.n_frames();
  std::vector<double> s = RowNorms(features);
  for (double& v : s) v = normalizer > 0.0 ? v / normalizer : 0.0;
  const std::size_t half = window / 2;
  ScoreSequence scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += s[j];
    scores[i] = Clamp01(sum / static_cast<double>(hi - lo + 1));
  }
  return scores;
}

ScoreSequence NormSmoothOracle::DoScore(const VideoBundle& bundle,
                                        const PerturbationSpec& spec) const {
  return ScoreFeatures(MaskedFeatures(bundle, spec), MaxNorm(bundle.features),
                       window_);
}

// MeanFeatureScorer

OracleCapabilities MeanFeatureScorer::capabilities() const {
  return {.fragment_masks = true, .batch_limit = 1};
}

ScoreSequence MeanFeatureScorer::DoScore(const VideoBundle& bundle,
                                         const PerturbationSpec& spec) const {
  const FrameFeatures features = MaskedFeatures(bundle, spec);
  ScoreSequence scores(features.n_frames());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double sum = 0.0;
    for (float v : features.row(i)) sum += v;
    scores[i] = Clamp01(sum / static_cast<double>(features.dim()));
  }
  return scores;
}

// Pixel-space extraction

FeatureExtractor GridMeanExtractor(std::size_t grid) {
  if (grid == 0) throw ValidationError("grid extractor: grid must be >= 1");
  FeatureExtractor ex;
  ex.dim = grid * grid * 3;
  ex.extract = [grid](std::span<const std::uint8_t> rgb, std::size_t height,
                      std::size_t width) {
    std::vector<float> out(grid * grid * 3, 0.0f);
    for (std::size_t r = 0; r < grid; ++r) {
      const std::size_t y0 = r * height / grid, y1 = (r + 1) * height / grid;
      for (std::size_t c = 0; c < grid; ++c) {
        const std::size_t x0 = c * width / grid, x1 = (c + 1) * width / grid;
        const std::size_t count = (y1 - y0) * (x1 - x0);
        if (count == 0) continue;
        std::uint64_t sum[3] = {0, 0, 0};
        for (std::size_t y = y0; y < y1; ++y) {
          const std::uint8_t* px = rgb.data() + (y * width + x0) * 3;
          for (std::size_t x = x0; x < x1; ++x, px += 3) {
            sum[0] += px[0];
            sum[1] += px[1];
            sum[2] += px[2];
          }
        }
        for (std::size_t ch = 0; ch < 3; ++ch) {
          out[(r * grid + c) * 3 + ch] = static_cast<float>(
              static_cast<double>(sum[ch]) / (255.0 * count));
        }
      }
    }
    return out;
  };
  return ex;
}

FrameFeatures ExtractFeatures(const FeatureExtractor& extractor,
                              const RgbFrames& frames) {
  std::vector<float> data;
  data.reserve(frames.n_frames() * extractor.dim);
  for (std::size_t i = 0; i < frames.n_frames(); ++i) {
    std::vector<float> row =
        extractor.extract(frames.frame(i), frames.height(), frames.width());
    if (row.size() != extractor.dim) {
      throw ValidationError("feature extractor returned wrong dimension");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return FrameFeatures(frames.n_frames(), extractor.dim, std::move(data));
}

// PixelOracle

PixelOracle::PixelOracle(FeatureExtractor extractor,
                         std::shared_ptr<const Oracle> inner)
    : extractor_(std::move(extractor)), inner_(std::move(inner)) {
  if (!extractor_.extract || extractor_.dim == 0 || !inner_) {
    throw ValidationError("pixel oracle: extractor and inner oracle required");
  }
}

OracleCapabilities PixelOracle::capabilities() const {
  const OracleCapabilities inner = inner_->capabilities();
  return {.fragment_masks = true,
          .object_masks = true,
          .attention = inner.attention,
          .batch_limit = inner.batch_limit};
}

std::shared_ptr<const FrameFeatures> PixelOracle::BaselineFeatures(
    const VideoBundle& bundle) const {
  if (!bundle.frames) {
    throw OracleError("pixel oracle needs raw frames for " + bundle.video_id);
  }
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(bundle.frames.get());
    if (it != cache_.end()) return it->second.features;
  }
  auto features = std::make_shared<const FrameFeatures>(
      ExtractFeatures(extractor_, *bundle.frames));
  std::lock_guard<std::mutex> lock(cache_mu_);
  if (cache_.size() >= kMaxCachedVideos) cache_.clear();
  cache_.emplace(bundle.frames.get(), CacheEntry{bundle.frames, features});
  return features;
}

FrameFeatures PixelOracle::PerturbedFeatures(
    const VideoBundle& bundle, const PerturbationSpec& spec) const {
  const auto baseline = BaselineFeatures(bundle);
  if (spec.kind == PerturbationSpec::Kind::kNone) return *baseline;

  const RgbFrames& frames = *bundle.frames;
  const std::size_t dim = extractor_.dim;
  std::vector<float> data(baseline->data().begin(), baseline->data().end());
  auto replace_row = [&](std::size_t frame,
                         std::span<const std::uint8_t> pixels) {
    std::vector<float> row =
        extractor_.extract(pixels, frames.height(), frames.width());
    std::copy(row.begin(), row.end(),
              data.begin() + static_cast<std::ptrdiff_t>(frame * dim));
  };

  if (spec.kind == PerturbationSpec::Kind::kFragments) {
    const std::vector<std::uint8_t> black(frames.frame_size(), 0);
    for (std::size_t f : bundle.fragmentation.FramesOf(spec.masked_fragments)) {
      replace_row(f, black);
    }
  } else {
    const SegmentationMaps& seg = *bundle.segmentation;
    if (seg.height() != frames.height() || seg.width() != frames.width()) {
      throw OracleError("segmentation grid does not match frame size for " +
                        bundle.video_id);
    }
    const Fragment& frag = bundle.fragmentation[spec.target_fragment];
    std::vector<std::uint8_t> buf(frames.frame_size());
    for (std::size_t f = frag.start; f <= frag.end; ++f) {
      const auto labels = seg.frame(f);
      const auto src = frames.frame(f);
      std::copy(src.begin(), src.end(), buf.begin());
      bool touched = false;
      for (std::size_t p = 0; p < labels.size(); ++p) {
        if (std::binary_search(spec.masked_objects.begin(),
                               spec.masked_objects.end(), labels[p])) {
          buf[p * 3] = buf[p * 3 + 1] = buf[p * 3 + 2] = 0;
          touched = true;
        }
      }
      if (touched) replace_row(f, buf);
    }
  }
  return FrameFeatures(baseline->n_frames(), dim, std::move(data));
}

ScoreSequence PixelOracle::DoScore(const VideoBundle& bundle,
                                   const PerturbationSpec& spec) const {
  return inner_->Score(WithFeatures(bundle, PerturbedFeatures(bundle, spec)),
                       PerturbationSpec::None());
}

AttentionDiagonal PixelOracle::DoAttention(const VideoBundle& bundle) const {
  return inner_->Attention(WithFeatures(bundle, *BaselineFeatures(bundle)));
}

std::shared_ptr<const Oracle> MakeLinearMaskOracle(
    double base, std::vector<double> fragment_weights, double frame_slope) {
  return std::make_shared<LinearMaskOracle>(base, std::move(fragment_weights),
                                            frame_slope);
}

std::shared_ptr<const Oracle> MakeToyAttentionScorer() {
  return std::make_shared<ToyAttentionScorer>();
}

std::shared_ptr<const Oracle> MakeNormSmoothOracle(std::size_t window) {
  return std::make_shared<NormSmoothOracle>(window);
}

std::shared_ptr<const Oracle> MakePixelOracle(
    FeatureExtractor extractor, std::shared_ptr<const Oracle> inner) {
  return std::make_shared<PixelOracle>(std::move(extractor), std::move(inner));
}

}  // namespace xsumx
