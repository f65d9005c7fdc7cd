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

#include "xsumx/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "xsumx/parallel.h"

namespace xsumx {
namespace {

// Sum of t(t-1)/2 over runs of equal adjacent values.
template <typename Eq>
std::int64_t TiedPairs(std::size_t n, Eq&& equal_to_prev) {
  std::int64_t pairs = 0, run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal_to_prev(i)) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs + run * (run - 1) / 2;
}

// Sorts v ascending and returns the number of strictly inverted pairs.
std::int64_t CountInversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[out++] = v[j++];
        } else {
          buf[out++] = v[i++];
        }
      }
      while (i < mid) buf[out++] = v[i++];
      while (j < hi) buf[out++] = v[j++];
    }
    std::swap(v, buf);
  }
  return swaps;
}

std::optional<double> Mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

Json OptJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptFromJson(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json RowJson(const DiscRow& row) {
  Json out = Json::array();
  for (const auto& v : row) out.push_back(OptJson(v));
  return out;
}

DiscRow RowFromJson(const Json& j) {
  DiscRow row;
  if (j.size() != kMaxK) throw ValidationError("report: bad disc row");
  for (std::size_t i = 0; i < kMaxK; ++i) row[i] = OptFromJson(j[i]);
  return row;
}

// Display width of a UTF-8 string (code points).
std::size_t Columns(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string Pad(const std::string& s, std::size_t width, bool left) {
  const std::size_t cols = Columns(s);
  if (cols >= width) return s;
  const std::string fill(width - cols, ' ');
  return left ? fill + s : s + fill;
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

}  // namespace

double KendallTau(std::span<const double> a, std::span<const double> b,
                  Findings* findings) {
  if (a.size() != b.size()) {
    throw ValidationError("kendall tau: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  if (n < 2) throw ValidationError("kendall tau: need at least 2 values");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) {
      throw ValidationError("kendall tau: NaN input");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });
  const std::int64_t n0 = static_cast<std::int64_t>(n) *
                          static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = TiedPairs(
      n, [&](std::size_t i) { return a[order[i]] == a[order[i - 1]]; });
  const std::int64_t n3 = TiedPairs(n, [&](std::size_t i) {
    return a[order[i]] == a[order[i - 1]] && b[order[i]] == b[order[i - 1]];
  });
  std::vector<double> sorted_b(n);
  for (std::size_t i = 0; i < n; ++i) sorted_b[i] = b[order[i]];
  const std::int64_t swaps = CountInversions(sorted_b);
  const std::int64_t n2 = TiedPairs(
      n, [&](std::size_t i) { return sorted_b[i] == sorted_b[i - 1]; });

  if (n1 == n0 || n2 == n0) {
    AddFinding(findings, "kendall tau",
               "degenerate: constant input sequence, tau defined as 0");
    return 0.0;
  }
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

double DeltaE(const Oracle& oracle, const VideoBundle& bundle,
              const PerturbationSpec& spec, const DeltaScope& scope,
              const ScoreSequence* baseline, Findings* findings) {
  ScoreSequence own;
  if (baseline == nullptr) {
    own = oracle.Score(bundle, PerturbationSpec::None());
    baseline = &own;
  }
  const ScoreSequence perturbed = oracle.Score(bundle, spec);
  std::size_t lo = 0, hi = bundle.n_frames() - 1;
  if (scope.kind == DeltaScope::Kind::kFragmentOnly) {
    if (scope.fragment_index >= bundle.fragmentation.size()) {
      throw ValidationError("delta E: scope fragment out of range");
    }
    lo = bundle.fragmentation[scope.fragment_index].start;
    hi = bundle.fragmentation[scope.fragment_index].end;
  }
  if (hi == lo) {
    AddFinding(findings, bundle.video_id,
               "delta E over a single frame; tau defined as 0");
    return 0.0;
  }
  const std::size_t len = hi - lo + 1;
  return KendallTau(std::span<const double>(*baseline).subspan(lo, len),
                    std::span<const double>(perturbed).subspan(lo, len),
                    findings);
}

RankedExplanation RankedExplanation::FromFragments(
    const FragmentExplanation& e) {
  RankedExplanation r;
  r.video_id = e.video_id;
  for (std::size_t i : e.ranking) {
    r.ranking.push_back(static_cast<std::uint32_t>(i));
  }
  return r;
}

RankedExplanation RankedExplanation::FromObjects(const ObjectExplanation& e) {
  RankedExplanation r;
  r.video_id = e.video_id;
  r.ranking.assign(e.ranking.begin(), e.ranking.end());
  r.object_fragment = e.fragment_index;
  return r;
}

std::string RankedExplanation::unit_id() const {
  return object_fragment ? video_id + "/f" + std::to_string(*object_fragment)
                         : video_id;
}

PerturbationSpec RankedExplanation::MaskFor(
    std::span<const std::uint32_t> items) const {
  if (object_fragment) {
    std::vector<ObjectId> ids;
    for (std::uint32_t i : items) ids.push_back(static_cast<ObjectId>(i));
    return PerturbationSpec::Objects(*object_fragment, std::move(ids));
  }
  return PerturbationSpec::Fragments(
      std::vector<std::size_t>(items.begin(), items.end()));
}

DeltaScope RankedExplanation::scope() const {
  return object_fragment ? DeltaScope::FragmentOnly(*object_fragment)
                         : DeltaScope::WholeVideo();
}

std::vector<std::uint32_t> DiscItems(std::span<const std::uint32_t> ranking,
                                     DiscSign sign, DiscMode mode,
                                     std::size_t k) {
  if (k == 0 || ranking.size() < k) return {};
  std::vector<std::uint32_t> from_end;
  if (sign == DiscSign::kPlus) {
    from_end.assign(ranking.begin(), ranking.begin() + k);
  } else {
    from_end.assign(ranking.rbegin(), ranking.rbegin() + k);
  }
  if (mode == DiscMode::kOneByOne) return {from_end.back()};
  return from_end;
}

std::optional<double> Discoverability(const Oracle& oracle,
                                      const VideoBundle& bundle,
                                      const RankedExplanation& explanation,
                                      DiscSign sign, DiscMode mode,
                                      std::size_t k,
                                      const ScoreSequence* baseline,
                                      Findings* findings) {
  const std::vector<std::uint32_t> items =
      DiscItems(explanation.ranking, sign, mode, k);
  if (items.empty()) return std::nullopt;
  return DeltaE(oracle, bundle, explanation.MaskFor(items),
                explanation.scope(), baseline, findings);
}

std::optional<double> SanityViolation(
    std::span<const std::pair<double, double>> plus_minus) {
  if (plus_minus.empty()) return std::nullopt;
  std::size_t violations = 0;
  for (const auto& [plus, minus] : plus_minus) {
    if (plus >= minus) ++violations;
  }
  return static_cast<double>(violations) /
         static_cast<double>(plus_minus.size());
}

namespace {

UnitResult EvaluateUnit(const Oracle& oracle, const VideoBundle& bundle,
                        const RankedExplanation& e, Findings* findings) {
  UnitResult u;
  u.unit_id = e.unit_id();
  u.n_items = e.ranking.size();
  if (u.n_items < 2) return u;
  const ScoreSequence baseline = oracle.Score(bundle, PerturbationSpec::None());
  for (std::size_t k = 1; k <= kMaxK && 2 * k <= u.n_items; ++k) {
    auto disc = [&](DiscSign sign, DiscMode mode) {
      return Discoverability(oracle, bundle, e, sign, mode, k, &baseline,
                             findings);
    };
    u.disc_plus[k - 1] = disc(DiscSign::kPlus, DiscMode::kOneByOne);
    u.disc_minus[k - 1] = disc(DiscSign::kMinus, DiscMode::kOneByOne);
    if (k == 1) {
      u.disc_plus_seq[0] = u.disc_plus[0];
      u.disc_minus_seq[0] = u.disc_minus[0];
    } else {
      u.disc_plus_seq[k - 1] = disc(DiscSign::kPlus, DiscMode::kSequential);
      u.disc_minus_seq[k - 1] = disc(DiscSign::kMinus, DiscMode::kSequential);
    }
  }
  return u;
}

TierReport BuildTier(const std::vector<UnitResult>& units,
                     std::size_t min_items) {
  TierReport tier;
  tier.min_items = min_items;
  std::vector<const UnitResult*> eligible;
  for (const UnitResult& u : units) {
    if (u.n_items >= 2 * min_items) {
      eligible.push_back(&u);
      tier.eligible_ids.push_back(u.unit_id);
    }
  }
  std::vector<std::pair<double, double>> pooled, pooled_seq;
  for (std::size_t k = 1; k <= min_items; ++k) {
    TierRow row;
    row.k = k;
    row.units = eligible.size();
    std::vector<double> dp, dps, dm, dms;
    std::vector<std::pair<double, double>> pairs, pairs_seq;
    for (const UnitResult* u : eligible) {
      dp.push_back(*u->disc_plus[k - 1]);
      dps.push_back(*u->disc_plus_seq[k - 1]);
      dm.push_back(*u->disc_minus[k - 1]);
      dms.push_back(*u->disc_minus_seq[k - 1]);
      pairs.emplace_back(dp.back(), dm.back());
      pairs_seq.emplace_back(dps.back(), dms.back());
    }
    row.disc_plus = Mean(dp);
    row.disc_plus_seq = Mean(dps);
    row.disc_minus = Mean(dm);
    row.disc_minus_seq = Mean(dms);
    row.sv = SanityViolation(pairs);
    row.sv_seq = SanityViolation(pairs_seq);
    pooled.insert(pooled.end(), pairs.begin(), pairs.end());
    pooled_seq.insert(pooled_seq.end(), pairs_seq.begin(), pairs_seq.end());
    tier.rows.push_back(row);
  }
  tier.sv = SanityViolation(pooled);
  tier.sv_seq = SanityViolation(pooled_seq);
  return tier;
}

}  // namespace

EvaluationReport EvaluateCorpus(const Oracle& oracle,
                                std::span<const VideoBundle> bundles,
                                std::span<const MethodExplanations> methods,
                                const EvaluationConfig& config,
                                Findings* findings) {
  std::map<std::string, const VideoBundle*> by_id;
  for (const VideoBundle& b : bundles) by_id[b.video_id] = &b;
  std::size_t total = 0;
  for (const auto& m : methods) total += m.explanations.size();
  if (bundles.empty() || total == 0) {
    throw ValidationError("evaluation: empty corpus");
  }

  EvaluationReport report;
  report.level = config.level;
  for (const MethodExplanations& m : methods) {
    for (const RankedExplanation& e : m.explanations) {
      if (!by_id.count(e.video_id)) {
        throw ValidationError("evaluation: no bundle for video " + e.video_id);
      }
    }
    MethodReport mr;
    mr.label = m.label;
    mr.units.resize(m.explanations.size());
    std::vector<Findings> unit_findings(m.explanations.size());
    ParallelFor(m.explanations.size(), config.workers, [&](std::size_t i) {
      const RankedExplanation& e = m.explanations[i];
      mr.units[i] =
          EvaluateUnit(oracle, *by_id.at(e.video_id), e, &unit_findings[i]);
    });
    for (const Findings& f : unit_findings) {
      for (const Finding& x : f) AddFinding(findings, x.component, x.message);
    }
    mr.tiers.push_back(BuildTier(mr.units, 1));
    mr.tiers.push_back(BuildTier(mr.units, kMaxK));
    report.methods.push_back(std::move(mr));
  }
  return report;
}

Json ToJson(const EvaluationReport& report) {
  Json methods = Json::array();
  for (const MethodReport& m : report.methods) {
    Json units = Json::array();
    for (const UnitResult& u : m.units) {
      units.push_back(Json{{"unit_id", u.unit_id},
                           {"n_items", u.n_items},
                           {"disc_plus", RowJson(u.disc_plus)},
                           {"disc_plus_seq", RowJson(u.disc_plus_seq)},
                           {"disc_minus", RowJson(u.disc_minus)},
                           {"disc_minus_seq", RowJson(u.disc_minus_seq)}});
    }
    Json tiers = Json::array();
    for (const TierReport& t : m.tiers) {
      Json rows = Json::array();
      for (const TierRow& r : t.rows) {
        rows.push_back(Json{{"k", r.k},
                            {"units", r.units},
                            {"disc_plus", OptJson(r.disc_plus)},
                            {"disc_plus_seq", OptJson(r.disc_plus_seq)},
                            {"disc_minus", OptJson(r.disc_minus)},
                            {"disc_minus_seq", OptJson(r.disc_minus_seq)},
                            {"sv", OptJson(r.sv)},
                            {"sv_seq", OptJson(r.sv_seq)}});
      }
      tiers.push_back(Json{{"min_items", t.min_items},
                           {"eligible_ids", t.eligible_ids},
                           {"rows", rows},
                           {"sv", OptJson(t.sv)},
                           {"sv_seq", OptJson(t.sv_seq)}});
    }
    methods.push_back(
        Json{{"label", m.label}, {"units", units}, {"tiers", tiers}});
  }
  return Json{{"level", report.level}, {"methods", methods}};
}

EvaluationReport EvaluationReportFromJson(const Json& j) {
  try {
    EvaluationReport report;
    report.level = j.at("level").get<std::string>();
    for (const Json& mj : j.at("methods")) {
      MethodReport m;
      m.label = mj.at("label").get<std::string>();
      for (const Json& uj : mj.at("units")) {
        UnitResult u;
        u.unit_id = uj.at("unit_id").get<std::string>();
        u.n_items = uj.at("n_items").get<std::size_t>();
        u.disc_plus = RowFromJson(uj.at("disc_plus"));
        u.disc_plus_seq = RowFromJson(uj.at("disc_plus_seq"));
        u.disc_minus = RowFromJson(uj.at("disc_minus"));
        u.disc_minus_seq = RowFromJson(uj.at("disc_minus_seq"));
        m.units.push_back(std::move(u));
      }
      for (const Json& tj : mj.at("tiers")) {
        TierReport t;
        t.min_items = tj.at("min_items").get<std::size_t>();
        t.eligible_ids = tj.at("eligible_ids").get<std::vector<std::string>>();
        for (const Json& rj : tj.at("rows")) {
          TierRow r;
          r.k = rj.at("k").get<std::size_t>();
          r.units = rj.at("units").get<std::size_t>();
          r.disc_plus = OptFromJson(rj.at("disc_plus"));
          r.disc_plus_seq = OptFromJson(rj.at("disc_plus_seq"));
          r.disc_minus = OptFromJson(rj.at("disc_minus"));
          r.disc_minus_seq = OptFromJson(rj.at("disc_minus_seq"));
          r.sv = OptFromJson(rj.at("sv"));
          r.sv_seq = OptFromJson(rj.at("sv_seq"));
          t.rows.push_back(r);
        }
        t.sv = OptFromJson(tj.at("sv"));
        t.sv_seq = OptFromJson(tj.at("sv_seq"));
        m.tiers.push_back(std::move(t));
      }
      report.methods.push_back(std::move(m));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("evaluation report: ") + e.what());
  }
}

std::string FormatReportTable(const EvaluationReport& report) {
  static const char* kHeaders[] = {"Disc+ (↓)", "Disc+ Seq (↓)", "Disc- (↑)",
                                   "Disc- Seq (↑)", "SV (↓)", "SV Seq (↓)"};
  constexpr std::size_t kRowLabel = 14;
  std::size_t method_width = 6;
  for (const MethodReport& m : report.methods) {
    method_width = std::max(method_width, Columns(m.label));
  }
  std::ostringstream out;
  std::string header = Pad("", kRowLabel, false) + "  " +
                       Pad("", method_width, false);
  for (const char* h : kHeaders) header += "  " + Pad(h, Columns(h), true);
  const std::string rule(Columns(header), '-');

  if (report.methods.empty()) return "no methods evaluated\n";
  const std::size_t n_tiers = report.methods.front().tiers.size();
  for (std::size_t t = 0; t < n_tiers; ++t) {
    const std::size_t min_items = report.methods.front().tiers[t].min_items;
    out << "Level: " << report.level << " | units with at least " << min_items
        << " top- and " << min_items << " bottom-scoring item"
        << (min_items > 1 ? "s" : "") << "\n";
    for (const MethodReport& m : report.methods) {
      out << "  " << Pad(m.label, method_width, false) << ": "
          << m.tiers[t].eligible_ids.size() << " of " << m.units.size()
          << " units eligible\n";
    }
    out << header << "\n" << rule << "\n";
    for (std::size_t k = 1; k <= min_items; ++k) {
      for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
        const MethodReport& m = report.methods[mi];
        const TierRow& r = m.tiers[t].rows[k - 1];
        const std::string label =
            mi == 0 ? "Top/Bottom-" + std::to_string(k) : "";
        // Sequential masking of a single item equals one-by-one masking.
        const bool seq = k > 1;
        const std::string cells[] = {
            Cell(r.disc_plus),  seq ? Cell(r.disc_plus_seq) : "-",
            Cell(r.disc_minus), seq ? Cell(r.disc_minus_seq) : "-",
            Cell(r.sv),         seq ? Cell(r.sv_seq) : "-"};
        out << Pad(label, kRowLabel, false) << "  "
            << Pad(m.label, method_width, false);
        for (std::size_t c = 0; c < 6; ++c) {
          out << "  " << Pad(cells[c], Columns(kHeaders[c]), true);
        }
        out << "\n";
      }
    }
    out << rule << "\n";
    for (const MethodReport& m : report.methods) {
      out << "  pooled SV " << Pad(m.label, method_width, false) << ": "
          << Cell(m.tiers[t].sv) << " (one-by-one), " << Cell(m.tiers[t].sv_seq)
          << " (sequential)\n";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace xsumx
