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

#include "xsumx/oracle.h"

#include <cmath>

namespace xsumx {

bool OracleCapabilities::Supports(PerturbationSpec::Kind kind) const {
  switch (kind) {
    case PerturbationSpec::Kind::kNone:
      return true;
    case PerturbationSpec::Kind::kFragments:
      return fragment_masks;
    case PerturbationSpec::Kind::kObjects:
      return object_masks;
  }
  return false;
}

ScoreSequence Oracle::Score(const VideoBundle& bundle,
                            const PerturbationSpec& spec) const {
  if (!capabilities().Supports(spec.kind)) {
    throw OracleError(std::string("oracle does not support ") +
                      KindName(spec.kind) + " masks");
  }
  ValidateSpec(spec, bundle);
  ScoreSequence scores = DoScore(bundle, spec);
  if (scores.size() != bundle.n_frames()) {
    throw OracleError("oracle returned " + std::to_string(scores.size()) +
                      " scores for " + std::to_string(bundle.n_frames()) +
                      " frames of " + bundle.video_id);
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw OracleError("oracle returned a non-finite score for " +
                        bundle.video_id);
    }
  }
  return scores;
}

AttentionDiagonal Oracle::Attention(const VideoBundle& bundle) const {
  if (!capabilities().attention) {
    throw OracleError("oracle does not expose attention weights");
  }
  AttentionDiagonal diag = DoAttention(bundle);
  if (diag.size() != bundle.n_frames()) {
    throw OracleError("attention diagonal has " + std::to_string(diag.size()) +
                      " entries for " + std::to_string(bundle.n_frames()) +
                      " frames");
  }
  return diag;
}

AttentionDiagonal Oracle::DoAttention(const VideoBundle&) const {
  throw OracleError("oracle does not expose attention weights");
}

FrameFeatures MaskedFeatures(const VideoBundle& bundle,
                             const PerturbationSpec& spec) {
  switch (spec.kind) {
    case PerturbationSpec::Kind::kNone:
      return bundle.features;
    case PerturbationSpec::Kind::kFragments:
      return bundle.features.WithZeroedFrames(
          bundle.fragmentation.FramesOf(spec.masked_fragments));
    case PerturbationSpec::Kind::kObjects:
      break;
  }
  throw OracleError("object masks need a pixel-space feature extractor");
}

}  // namespace xsumx
