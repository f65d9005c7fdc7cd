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

#ifndef XSUMX_FRAGMENTATION_H_
#define XSUMX_FRAGMENTATION_H_

#include <cstddef>
#include <vector>

#include "xsumx/types.h"

namespace xsumx {

struct FragmenterConfig {
  // Boundary after frame i when 1 - cos(f_i, f_{i+1}) exceeds this.
  double distance_threshold = 0.5;
  // Videos with fewer fragments are re-partitioned.
  std::size_t min_fragments = 10;
  std::size_t fallback_fragment_count = 12;

  // Throws ValidationError when the invariants do not hold.
  void Validate() const;
};

// Cosine-distance shot boundaries over consecutive feature rows. A zero row
// has distance 0 to another zero row and 1 to anything else.
Fragmentation DetectShots(const FrameFeatures& features,
                          const FragmenterConfig& cfg);

// Returns `frag` when it has at least `min_fragments` fragments, otherwise a
// uniform re-partition into `fallback_fragment_count` fragments (or one per
// frame on short videos). Remainder frames go to the earliest fragments.
Fragmentation SubdivideIfNeeded(const Fragmentation& frag,
                                const FragmenterConfig& cfg);

// Uniform partition into `count` fragments whose lengths differ by at most 1.
Fragmentation UniformFragmentation(std::size_t n_frames, std::size_t count);

// Mean score per fragment.
std::vector<double> FragmentScores(const ScoreSequence& scores,
                                   const Fragmentation& frag);

}  // namespace xsumx

#endif  // XSUMX_FRAGMENTATION_H_
