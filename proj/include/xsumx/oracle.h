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

#ifndef XSUMX_ORACLE_H_
#define XSUMX_ORACLE_H_

#include <cstddef>
#include <vector>

#include "xsumx/types.h"

namespace xsumx {

struct OracleCapabilities {
  bool fragment_masks = false;
  bool object_masks = false;
  bool attention = false;
  std::size_t batch_limit = 1;

  bool Supports(PerturbationSpec::Kind kind) const;
  bool operator==(const OracleCapabilities&) const = default;
};

// Per-frame self-attention weights A_ii.
using AttentionDiagonal = std::vector<double>;

// A black-box summarizer: scores a video under a declarative perturbation.
// Implementations must be deterministic and callable from several threads.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual OracleCapabilities capabilities() const = 0;

  // Checks capability and spec validity, then delegates to DoScore. Throws
  // OracleError for unsupported kinds or a wrong-length result and
  // ValidationError for specs that do not fit the bundle.
  ScoreSequence Score(const VideoBundle& bundle,
                      const PerturbationSpec& spec) const;

  // Throws OracleError unless capabilities().attention.
  AttentionDiagonal Attention(const VideoBundle& bundle) const;

 protected:
  virtual ScoreSequence DoScore(const VideoBundle& bundle,
                                const PerturbationSpec& spec) const = 0;
  virtual AttentionDiagonal DoAttention(const VideoBundle& bundle) const;
};

// Feature-space image of a fragment mask: masked frames become zero rows.
// Object masks cannot be expressed in feature space and throw OracleError.
FrameFeatures MaskedFeatures(const VideoBundle& bundle,
                             const PerturbationSpec& spec);

}  // namespace xsumx

#endif  // XSUMX_ORACLE_H_
