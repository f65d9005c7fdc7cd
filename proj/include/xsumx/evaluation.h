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

#ifndef XSUMX_EVALUATION_H_
#define XSUMX_EVALUATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xsumx/explanation.h"
#include "xsumx/oracle.h"

namespace xsumx {

// Kendall's tau-b over all pairs:
//   (C - D) / sqrt((n0 - n1)(n0 - n2))
// with n0 = n(n-1)/2 and n1, n2 the pairs tied in a and b. O(n log n).
// Returns 0 and records a "degenerate" finding when either input is
// constant. Throws ValidationError on length mismatch, n < 2 or NaN.
double KendallTau(std::span<const double> a, std::span<const double> b,
                  Findings* findings = nullptr);

struct DeltaScope {
  enum class Kind { kWholeVideo, kFragmentOnly };
  Kind kind = Kind::kWholeVideo;
  std::size_t fragment_index = 0;

  static DeltaScope WholeVideo() { return {}; }
  static DeltaScope FragmentOnly(std::size_t k) {
    return {Kind::kFragmentOnly, k};
  }
};

// tau(y, y^k) between baseline and perturbed scores restricted to `scope`.
// `baseline` is requested from the oracle when not supplied.
double DeltaE(const Oracle& oracle, const VideoBundle& bundle,
              const PerturbationSpec& spec, const DeltaScope& scope,
              const ScoreSequence* baseline = nullptr,
              Findings* findings = nullptr);

enum class DiscSign { kPlus, kMinus };
enum class DiscMode { kOneByOne, kSequential };

// An explanation reduced to what the evaluation needs: ranked item IDs
// (fragment indices, or object IDs inside `object_fragment`).
struct RankedExplanation {
  std::string video_id;
  std::vector<std::uint32_t> ranking;
  std::optional<std::size_t> object_fragment;

  static RankedExplanation FromFragments(const FragmentExplanation& e);
  static RankedExplanation FromObjects(const ObjectExplanation& e);

  // "video" for fragment explanations, "video/f<k>" for object ones.
  std::string unit_id() const;
  PerturbationSpec MaskFor(std::span<const std::uint32_t> items) const;
  DeltaScope scope() const;
};

// Items masked for Disc at rank k (1-based): the k-th item from the
// relevant end (one-by-one) or the first k items from it (sequential).
// Empty when the ranking has fewer than k items.
std::vector<std::uint32_t> DiscItems(std::span<const std::uint32_t> ranking,
                                     DiscSign sign, DiscMode mode,
                                     std::size_t k);

// Delta E after masking DiscItems(...). nullopt when ineligible.
std::optional<double> Discoverability(const Oracle& oracle,
                                      const VideoBundle& bundle,
                                      const RankedExplanation& explanation,
                                      DiscSign sign, DiscMode mode,
                                      std::size_t k,
                                      const ScoreSequence* baseline = nullptr,
                                      Findings* findings = nullptr);

// Fraction of (Disc+, Disc-) pairs with Disc+ >= Disc-. nullopt when empty.
std::optional<double> SanityViolation(
    std::span<const std::pair<double, double>> plus_minus);

inline constexpr std::size_t kMaxK = 3;

using DiscRow = std::array<std::optional<double>, kMaxK>;  // index k-1

struct UnitResult {
  std::string unit_id;
  std::size_t n_items = 0;
  DiscRow disc_plus, disc_plus_seq, disc_minus, disc_minus_seq;
};

struct TierRow {
  std::size_t k = 1;
  std::size_t units = 0;
  std::optional<double> disc_plus, disc_plus_seq, disc_minus, disc_minus_seq;
  std::optional<double> sv, sv_seq;
};

// Units with at least `min_items` top and `min_items` bottom items
// (2 * min_items distinct items).
struct TierReport {
  std::size_t min_items = 1;
  std::vector<std::string> eligible_ids;
  std::vector<TierRow> rows;  // k = 1..min_items
  std::optional<double> sv, sv_seq;  // pooled over the tier's rows
};

struct MethodReport {
  std::string label;
  std::vector<UnitResult> units;
  std::vector<TierReport> tiers;  // min_items 1 and 3
};

struct EvaluationReport {
  std::string level;  // "fragments" or "objects"
  std::vector<MethodReport> methods;
};

struct MethodExplanations {
  std::string label;
  std::vector<RankedExplanation> explanations;
};

struct EvaluationConfig {
  std::string level = "fragments";
  std::size_t workers = 1;
};

// Scores every explanation against the bundle with the same video_id.
// Throws ValidationError on an empty corpus or unknown video_id.
EvaluationReport EvaluateCorpus(const Oracle& oracle,
                                std::span<const VideoBundle> bundles,
                                std::span<const MethodExplanations> methods,
                                const EvaluationConfig& config,
                                Findings* findings = nullptr);

Json ToJson(const EvaluationReport& report);
EvaluationReport EvaluationReportFromJson(const Json& j);

// Plain-text table: one block per tier, one row per k and method, columns
// Disc+ (↓), Disc+ Seq (↓), Disc- (↑), Disc- Seq (↑), SV (↓), SV Seq (↓).
std::string FormatReportTable(const EvaluationReport& report);

}  // namespace xsumx

#endif  // XSUMX_EVALUATION_H_
