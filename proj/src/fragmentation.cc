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

#include "xsumx/fragmentation.h"

#include <cmath>

namespace xsumx {
namespace {

double CosineDistance(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double{a[i]} * b[i];
    na += double{a[i]} * a[i];
    nb += double{b[i]} * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

void FragmenterConfig::Validate() const {
  if (!(distance_threshold > 0.0)) {
    throw ValidationError("fragmenter: distance_threshold must be > 0");
  }
  if (min_fragments < 1) {
    throw ValidationError("fragmenter: min_fragments must be >= 1");
  }
  if (fallback_fragment_count < min_fragments) {
    throw ValidationError(
        "fragmenter: fallback_fragment_count must be >= min_fragments");
  }
}

Fragmentation DetectShots(const FrameFeatures& features,
                          const FragmenterConfig& cfg) {
  cfg.Validate();
  std::vector<Fragment> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < features.n_frames(); ++i) {
    if (CosineDistance(features.row(i), features.row(i + 1)) >
        cfg.distance_threshold) {
      out.push_back({start, i});
      start = i + 1;
    }
  }
  out.push_back({start, features.n_frames() - 1});
  return Fragmentation(std::move(out), features.n_frames());
}

Fragmentation UniformFragmentation(std::size_t n_frames, std::size_t count) {
  if (count == 0 || count > n_frames) {
    throw ValidationError("uniform fragmentation: need 1 <= count <= n_frames");
  }
  const std::size_t base = n_frames / count;
  const std::size_t extra = n_frames % count;
  std::vector<Fragment> out;
  out.reserve(count);
  std::size_t start = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out.push_back({start, start + len - 1});
    start += len;
  }
  return Fragmentation(std::move(out), n_frames);
}

Fragmentation SubdivideIfNeeded(const Fragmentation& frag,
                                const FragmenterConfig& cfg) {
  cfg.Validate();
  if (frag.size() >= cfg.min_fragments) return frag;
  const std::size_t n = frag.n_frames();
  return UniformFragmentation(n, std::min(n, cfg.fallback_fragment_count));
}

std::vector<double> FragmentScores(const ScoreSequence& scores,
                                   const Fragmentation& frag) {
  if (scores.size() != frag.n_frames()) {
    throw ValidationError("fragment scores: " + std::to_string(scores.size()) +
                          " scores for " + std::to_string(frag.n_frames()) +
                          " frames");
  }
  std::vector<double> out;
  out.reserve(frag.size());
  for (const Fragment& f : frag.fragments()) {
    double sum = 0.0;
    for (std::size_t i = f.start; i <= f.end; ++i) sum += scores[i];
    out.push_back(sum / static_cast<double>(f.length()));
  }
  return out;
}

}  // namespace xsumx
