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

#include "xsumx/lime.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace xsumx {
namespace {

// Uniform double in [0,1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

const char* KernelName(KernelKind kind) {
  return kind == KernelKind::kUniform ? "uniform" : "exponential";
}

KernelKind ParseKernel(const std::string& name) {
  if (name == "uniform") return KernelKind::kUniform;
  if (name == "exponential") return KernelKind::kExponential;
  throw ValidationError("unknown kernel \"" + name +
                        "\" (expected uniform or exponential)");
}

LimeConfig LimeConfig::FragmentDefaults() { return LimeConfig{}; }

LimeConfig LimeConfig::ObjectDefaults() {
  LimeConfig cfg;
  cfg.num_perturbations = 2000;
  return cfg;
}

void LimeConfig::Validate() const {
  if (num_perturbations == 0) {
    throw ValidationError("lime: num_perturbations must be >= 1");
  }
  if (!(mask_probability > 0.0 && mask_probability < 1.0)) {
    throw ValidationError("lime: mask_probability must lie in (0,1)");
  }
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw ValidationError("lime: ridge_lambda must be a finite value >= 0");
  }
  if (kernel == KernelKind::kExponential && !(kernel_width > 0.0)) {
    throw ValidationError("lime: kernel_width must be > 0");
  }
}

std::vector<std::size_t> MaskSet::MaskedItems(std::size_t r) const {
  std::vector<std::size_t> out;
  const auto bits_r = row(r);
  for (std::size_t i = 0; i < n_items; ++i) {
    if (bits_r[i] == 0) out.push_back(i);
  }
  return out;
}

MaskSet SampleMasks(std::size_t n_items, const LimeConfig& cfg) {
  cfg.Validate();
  if (n_items == 0) throw ValidationError("lime: nothing to perturb");
  MaskSet set;
  set.n_items = n_items;
  if (n_items == 1) {
    set.bits = {1};
    set.degenerate = true;
    return set;
  }
  const bool fits = n_items < 63 &&
                    (std::uint64_t{1} << n_items) <= cfg.num_perturbations;
  if (cfg.exhaustive_when_possible && fits) {
    const std::uint64_t count = std::uint64_t{1} << n_items;
    set.exhaustive = true;
    set.bits.reserve(count * n_items);
    for (std::uint64_t code = count; code-- > 0;) {
      for (std::size_t i = 0; i < n_items; ++i) {
        set.bits.push_back(static_cast<std::uint8_t>((code >> i) & 1));
      }
    }
    return set;
  }
  if (cfg.num_perturbations < n_items + 2) {
    throw ValidationError("lime: " + std::to_string(cfg.num_perturbations) +
                          " perturbations cannot determine a fit over " +
                          std::to_string(n_items) + " items (need >= " +
                          std::to_string(n_items + 2) + ")");
  }

  std::mt19937_64 rng(cfg.rng_seed);
  set.bits.assign(n_items, 1);
  set.bits.reserve(cfg.num_perturbations * n_items);
  std::vector<std::uint8_t> row(n_items);
  for (std::size_t r = 1; r < cfg.num_perturbations; ++r) {
    bool any_present;
    do {
      any_present = false;
      for (auto& b : row) {
        b = Uniform01(rng) < cfg.mask_probability ? 1 : 0;
        any_present |= b != 0;
      }
    } while (!any_present);
    set.bits.insert(set.bits.end(), row.begin(), row.end());
  }
  return set;
}

double KernelWeight(std::span<const std::uint8_t> row, const LimeConfig& cfg) {
  if (cfg.kernel == KernelKind::kUniform) return 1.0;
  const double present = static_cast<double>(
      std::count_if(row.begin(), row.end(), [](std::uint8_t b) { return b; }));
  // Cosine similarity to the all-ones vector; 0 for the all-zeros row.
  const double cos_sim =
      present == 0.0 ? 0.0 : std::sqrt(present / static_cast<double>(row.size()));
  const double d = 1.0 - cos_sim;
  return std::exp(-(d * d) / (cfg.kernel_width * cfg.kernel_width));
}

SurrogateFit FitSurrogate(const MaskSet& masks, std::span<const double> targets,
                          const LimeConfig& cfg,
                          const std::string& item_label) {
  cfg.Validate();
  const std::size_t rows = masks.rows();
  const std::size_t n = masks.n_items;
  if (targets.size() != rows) {
    throw FitError("lime: " + std::to_string(targets.size()) +
                   " targets for " + std::to_string(rows) + " masks");
  }
  std::vector<double> w(rows);
  for (std::size_t r = 0; r < rows; ++r) w[r] = KernelWeight(masks.row(r), cfg);

  for (std::size_t i = 0; i < n; ++i) {
    bool seen[2] = {false, false};
    for (std::size_t r = 0; r < rows; ++r) {
      if (w[r] > 0.0) seen[masks.bits[r * n + i]] = true;
    }
    if (!seen[0] || !seen[1]) {
      throw FitError("lime: " + item_label + " " + std::to_string(i) +
                     " is never " + (seen[1] ? "masked" : "kept") +
                     "; its weight cannot be fitted");
    }
  }

  const bool ridge = cfg.ridge_lambda > 0.0;
  const Eigen::Index total_rows =
      static_cast<Eigen::Index>(rows + (ridge ? n : 0));
  const Eigen::Index cols = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(total_rows, cols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(total_rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double sw = std::sqrt(w[r]);
    const Eigen::Index er = static_cast<Eigen::Index>(r);
    a(er, 0) = sw;
    for (std::size_t i = 0; i < n; ++i) {
      a(er, static_cast<Eigen::Index>(i + 1)) = sw * masks.bits[r * n + i];
    }
    b(er) = sw * targets[r];
  }
  if (ridge) {
    const double sl = std::sqrt(cfg.ridge_lambda);
    for (std::size_t i = 0; i < n; ++i) {
      a(static_cast<Eigen::Index>(rows + i), static_cast<Eigen::Index>(i + 1)) =
          sl;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) {
    throw FitError("lime: rank-deficient design (" +
                   std::to_string(qr.rank()) + " of " + std::to_string(cols) +
                   " columns independent)");
  }
  const Eigen::VectorXd beta = qr.solve(b);

  SurrogateFit fit;
  fit.intercept = beta(0);
  fit.coefficients.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.coefficients[i] = beta(static_cast<Eigen::Index>(i + 1));
  }

  const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  if (*lo == *hi) {
    fit.r2 = 0.0;
    return fit;
  }
  double sw = 0.0, swy = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    sw += w[r];
    swy += w[r] * targets[r];
  }
  const double mean = swy / sw;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double pred = fit.intercept;
    for (std::size_t i = 0; i < n; ++i) {
      if (masks.bits[r * n + i]) pred += fit.coefficients[i];
    }
    ss_tot += w[r] * (targets[r] - mean) * (targets[r] - mean);
    ss_res += w[r] * (targets[r] - pred) * (targets[r] - pred);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

std::vector<std::size_t> RankByWeight(std::span<const double> weights) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return weights[a] > weights[b];
                   });
  return order;
}

}  // namespace xsumx
