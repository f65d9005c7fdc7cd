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

#include "xsumx/fragment_explainer.h"

#include <numeric>

#include "xsumx/fragmentation.h"
#include "xsumx/parallel.h"

namespace xsumx {
namespace {

double Mean(const ScoreSequence& scores) {
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

FragmentExplanation LimeFragmentExplain(const Oracle& oracle,
                                        const VideoBundle& bundle,
                                        const LimeConfig& cfg,
                                        std::size_t workers) {
  if (!oracle.capabilities().fragment_masks) {
    throw OracleError("oracle does not support fragment masks");
  }
  const std::size_t n = bundle.fragmentation.size();
  if (n < 2) {
    throw FitError("lime: video " + bundle.video_id +
                   " has a single fragment; nothing to compare");
  }
  const MaskSet masks = SampleMasks(n, cfg);
  std::vector<double> targets(masks.rows());
  ParallelFor(masks.rows(), workers, [&](std::size_t r) {
    std::vector<std::size_t> masked = masks.MaskedItems(r);
    const PerturbationSpec spec =
        masked.empty() ? PerturbationSpec::None()
                       : PerturbationSpec::Fragments(std::move(masked));
    targets[r] = Mean(oracle.Score(bundle, spec));
  });
  const SurrogateFit fit = FitSurrogate(masks, targets, cfg, "fragment");

  FragmentExplanation e;
  e.video_id = bundle.video_id;
  e.method = ExplanationMethod::kLime;
  e.weights = fit.coefficients;
  FillRanking(e.weights, Iota(n), &e.ranking, &e.top, &e.bottom);
  e.diagnostics.r2 = fit.r2;
  e.diagnostics.perturbations = masks.rows();
  e.diagnostics.exhaustive = masks.exhaustive;
  e.diagnostics.config = cfg;
  return e;
}

FragmentExplanation AttentionFragmentExplain(const Oracle& oracle,
                                             const VideoBundle& bundle) {
  const AttentionDiagonal diag = oracle.Attention(bundle);
  FragmentExplanation e;
  e.video_id = bundle.video_id;
  e.method = ExplanationMethod::kAttention;
  e.weights = FragmentScores(diag, bundle.fragmentation);
  FillRanking(e.weights, Iota(e.weights.size()), &e.ranking, &e.top,
              &e.bottom);
  return e;
}

}  // namespace xsumx
