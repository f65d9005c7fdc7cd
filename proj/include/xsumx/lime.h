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

#ifndef XSUMX_LIME_H_
#define XSUMX_LIME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xsumx/errors.h"

namespace xsumx {

enum class KernelKind { kUniform, kExponential };

const char* KernelName(KernelKind kind);
KernelKind ParseKernel(const std::string& name);

struct LimeConfig {
  std::size_t num_perturbations = 20000;
  double mask_probability = 0.5;  // P(bit = 1), i.e. item kept
  double ridge_lambda = 1e-8;
  KernelKind kernel = KernelKind::kUniform;
  double kernel_width = 0.25;
  std::uint64_t rng_seed = 0;
  bool exhaustive_when_possible = true;

  // M = 20000 perturbations for fragment masks.
  static LimeConfig FragmentDefaults();
  // N = 2000 perturbations for object masks.
  static LimeConfig ObjectDefaults();

  // Throws ValidationError on out-of-range fields.
  void Validate() const;

  bool operator==(const LimeConfig&) const = default;
};

// Binary design matrix, one row per perturbation. Bit 1 = item present,
// 0 = item masked out.
struct MaskSet {
  std::size_t n_items = 0;
  std::vector<std::uint8_t> bits;  // row-major, rows() x n_items
  bool exhaustive = false;
  // Set when no item can vary (a single item: the all-masked row is
  // rejected, leaving only the unperturbed row).
  bool degenerate = false;

  std::size_t rows() const { return n_items == 0 ? 0 : bits.size() / n_items; }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return std::span<const std::uint8_t>(bits).subspan(r * n_items, n_items);
  }
  // Indices of the 0 bits of row r.
  std::vector<std::size_t> MaskedItems(std::size_t r) const;
};

// Exhaustive enumeration (2^n rows, all-ones first) when allowed and
// 2^n <= num_perturbations; otherwise num_perturbations Bernoulli rows with
// the all-ones row first and all-zeros rows redrawn. Deterministic in
// cfg.rng_seed.
MaskSet SampleMasks(std::size_t n_items, const LimeConfig& cfg);

// Proximity weight of a mask row relative to the all-ones row.
double KernelWeight(std::span<const std::uint8_t> row, const LimeConfig& cfg);

struct SurrogateFit {
  double intercept = 0.0;
  std::vector<double> coefficients;  // one per item
  double r2 = 0.0;
};

// Weighted ridge least squares of `targets` on the mask bits plus an
// unpenalized intercept. R^2 is weighted and defined as 0 for a constant
// target. Throws FitError naming `item_label` i when item i never varies
// among positively weighted rows, or when the design is rank deficient.
SurrogateFit FitSurrogate(const MaskSet& masks, std::span<const double> targets,
                          const LimeConfig& cfg,
                          const std::string& item_label = "item");

// Item indices sorted by weight descending, ties to the lower index.
std::vector<std::size_t> RankByWeight(std::span<const double> weights);

}  // namespace xsumx

#endif  // XSUMX_LIME_H_
