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

#ifndef XSUMX_EXPLANATION_H_
#define XSUMX_EXPLANATION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xsumx/lime.h"
#include "xsumx/types.h"

namespace xsumx {

using Json = nlohmann::ordered_json;

// Explanations keep the three most and least influential items.
inline constexpr std::size_t kTopK = 3;

enum class ExplanationMethod { kLime, kAttention };

const char* MethodName(ExplanationMethod method);
ExplanationMethod ParseMethod(const std::string& name);

// How an explanation was produced.
struct Diagnostics {
  std::optional<double> r2;  // LIME only
  std::size_t perturbations = 0;
  bool exhaustive = false;
  std::optional<LimeConfig> config;  // LIME only

  bool operator==(const Diagnostics&) const = default;
};

struct FragmentExplanation {
  std::string video_id;
  ExplanationMethod method = ExplanationMethod::kLime;
  std::vector<double> weights;       // one per fragment
  std::vector<std::size_t> ranking;  // weight descending, ties to lower index
  std::vector<std::size_t> top;      // ranking[0..3)
  std::vector<std::size_t> bottom;   // least influential first
  Diagnostics diagnostics;
};

struct ObjectExplanation {
  std::string video_id;
  std::size_t fragment_index = 0;
  std::size_t keyframe_index = 0;
  std::map<ObjectId, double> object_weights;
  std::vector<ObjectId> ranking;
  std::vector<ObjectId> top;
  std::vector<ObjectId> bottom;  // least influential first
  Diagnostics diagnostics;
};

// Fills ranking/top/bottom from weights. Items are identified by position;
// `ids` maps positions to the reported identifiers.
template <typename Id>
void FillRanking(const std::vector<double>& weights, const std::vector<Id>& ids,
                 std::vector<Id>* ranking, std::vector<Id>* top,
                 std::vector<Id>* bottom) {
  const std::vector<std::size_t> order = RankByWeight(weights);
  ranking->clear();
  for (std::size_t i : order) ranking->push_back(ids[i]);
  const std::size_t k = std::min(kTopK, ranking->size());
  top->assign(ranking->begin(), ranking->begin() + k);
  bottom->assign(ranking->rbegin(), ranking->rbegin() + k);
}

Json ToJson(const LimeConfig& cfg);
LimeConfig LimeConfigFromJson(const Json& j);

Json ToJson(const FragmentExplanation& e);
FragmentExplanation FragmentExplanationFromJson(const Json& j);

Json ToJson(const ObjectExplanation& e);
ObjectExplanation ObjectExplanationFromJson(const Json& j);

// Stable textual form used for all written JSON artifacts.
std::string DumpJson(const Json& j);

}  // namespace xsumx

#endif  // XSUMX_EXPLANATION_H_
