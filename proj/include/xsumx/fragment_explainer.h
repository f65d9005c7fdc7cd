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

#ifndef XSUMX_FRAGMENT_EXPLAINER_H_
#define XSUMX_FRAGMENT_EXPLAINER_H_

#include "xsumx/explanation.h"
#include "xsumx/lime.h"
#include "xsumx/oracle.h"

namespace xsumx {

// Model-agnostic fragment explanation. Each mask row becomes a fragment
// perturbation; its regression target is the mean score over all frames of
// the video. Coefficients of the surrogate fit are the fragment weights.
// Oracle calls run on up to `workers` threads; the result does not depend
// on the worker count.
// Throws OracleError without fragment-mask support and FitError when the
// video has a single fragment or the design is degenerate.
FragmentExplanation LimeFragmentExplain(const Oracle& oracle,
                                        const VideoBundle& bundle,
                                        const LimeConfig& cfg,
                                        std::size_t workers = 1);

// Model-specific fragment explanation: fragment-mean of the attention
// diagonal. Throws OracleError without attention support.
FragmentExplanation AttentionFragmentExplain(const Oracle& oracle,
                                             const VideoBundle& bundle);

}  // namespace xsumx

#endif  // XSUMX_FRAGMENT_EXPLAINER_H_
