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

#include "xsumx/object_explainer.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

#include "xsumx/fragmentation.h"
#include "xsumx/parallel.h"

namespace xsumx {

const char* SelectionSourceName(SelectionSource source) {
  return source == SelectionSource::kFromExplanation ? "explanation"
                                                     : "summarizer";
}

FragmentSelection SelectFragmentsBySummarizer(const ScoreSequence& baseline,
                                              const Fragmentation& frag,
                                              std::size_t k) {
  const std::vector<double> means = FragmentScores(baseline, frag);
  const std::vector<std::size_t> order = RankByWeight(means);
  FragmentSelection sel;
  sel.source = SelectionSource::kFromSummarizer;
  sel.fragment_indices.assign(order.begin(),
                              order.begin() + std::min(k, order.size()));
  return sel;
}

FragmentSelection SelectFragmentsFromExplanation(
    const FragmentExplanation& explanation, std::size_t k) {
  FragmentSelection sel;
  sel.source = SelectionSource::kFromExplanation;
  const auto& r = explanation.ranking;
  sel.fragment_indices.assign(r.begin(), r.begin() + std::min(k, r.size()));
  return sel;
}

std::size_t SelectKeyframe(const ScoreSequence& baseline,
                           const Fragment& fragment) {
  if (fragment.end >= baseline.size() || fragment.start > fragment.end) {
    throw ValidationError("keyframe: fragment outside the score sequence");
  }
  std::size_t best = fragment.start;
  for (std::size_t i = fragment.start + 1; i <= fragment.end; ++i) {
    if (baseline[i] > baseline[best]) best = i;
  }
  return best;
}

std::vector<ObjectId> EnumerateObjects(const SegmentationMaps& seg,
                                       std::size_t keyframe,
                                       double min_area_fraction) {
  if (keyframe >= seg.n_frames()) {
    throw ValidationError("keyframe " + std::to_string(keyframe) +
                          " outside segmentation maps");
  }
  std::map<ObjectId, std::size_t> counts;
  for (ObjectId id : seg.frame(keyframe)) {
    if (id != kVoidObject) ++counts[id];
  }
  const double min_pixels =
      min_area_fraction * static_cast<double>(seg.frame_size());
  std::vector<ObjectId> out;
  for (const auto& [id, count] : counts) {
    if (static_cast<double>(count) >= min_pixels) out.push_back(id);
  }
  return out;
}

std::optional<ObjectExplanation> LimeObjectExplain(
    const Oracle& oracle, const VideoBundle& bundle, std::size_t fragment_index,
    const ObjectExplainOptions& options, Findings* findings,
    const ScoreSequence* baseline) {
  const std::string where =
      bundle.video_id + "/fragment " + std::to_string(fragment_index);
  if (!bundle.segmentation) {
    AddFinding(findings, where, "no segmentation maps; object explanation skipped");
    return std::nullopt;
  }
  if (!oracle.capabilities().object_masks) {
    throw OracleError("oracle does not support object masks");
  }
  if (fragment_index >= bundle.fragmentation.size()) {
    throw ValidationError("fragment index " + std::to_string(fragment_index) +
                          " out of range for " + bundle.video_id);
  }
  ScoreSequence own_baseline;
  if (baseline == nullptr) {
    own_baseline = oracle.Score(bundle, PerturbationSpec::None());
    baseline = &own_baseline;
  }
  const Fragment& frag = bundle.fragmentation[fragment_index];
  const std::size_t keyframe = SelectKeyframe(*baseline, frag);
  const std::vector<ObjectId> objects = EnumerateObjects(
      *bundle.segmentation, keyframe, options.min_area_fraction);
  if (objects.size() < 2) {
    AddFinding(findings, where,
               "keyframe " + std::to_string(keyframe) + " has " +
                   std::to_string(objects.size()) +
                   " object(s); object explanation skipped");
    return std::nullopt;
  }

  const MaskSet masks = SampleMasks(objects.size(), options.lime);
  std::vector<double> targets(masks.rows());
  ParallelFor(masks.rows(), options.workers, [&](std::size_t r) {
    std::vector<ObjectId> masked;
    for (std::size_t i : masks.MaskedItems(r)) masked.push_back(objects[i]);
    const PerturbationSpec spec =
        masked.empty()
            ? PerturbationSpec::None()
            : PerturbationSpec::Objects(fragment_index, std::move(masked));
    const ScoreSequence scores = oracle.Score(bundle, spec);
    double sum = 0.0;
    for (std::size_t f = frag.start; f <= frag.end; ++f) sum += scores[f];
    targets[r] = sum / static_cast<double>(frag.length());
  });
  const SurrogateFit fit = FitSurrogate(masks, targets, options.lime, "object");

  ObjectExplanation e;
  e.video_id = bundle.video_id;
  e.fragment_index = fragment_index;
  e.keyframe_index = keyframe;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    e.object_weights[objects[i]] = fit.coefficients[i];
  }
  FillRanking(fit.coefficients, objects, &e.ranking, &e.top, &e.bottom);
  e.diagnostics.r2 = fit.r2;
  e.diagnostics.perturbations = masks.rows();
  e.diagnostics.exhaustive = masks.exhaustive;
  e.diagnostics.config = options.lime;
  return e;
}

RgbImage FrameImage(const RgbFrames& frames, std::size_t index) {
  const auto px = frames.frame(index);
  return RgbImage{frames.height(), frames.width(),
                  std::vector<std::uint8_t>(px.begin(), px.end())};
}

RgbImage RenderOverlay(const RgbImage& frame, std::span<const ObjectId> labels,
                       std::span<const ObjectId> top,
                       std::span<const ObjectId> bottom, Findings* findings) {
  if (labels.size() != frame.height * frame.width ||
      frame.pixels.size() != labels.size() * 3) {
    throw ValidationError("overlay: label grid does not match frame size");
  }
  for (ObjectId id : top) {
    if (std::find(bottom.begin(), bottom.end(), id) != bottom.end()) {
      AddFinding(findings, "overlay",
                 "object " + std::to_string(id) +
                     " is both top and bottom; drawn as top");
    }
  }
  auto blend = [](std::uint8_t orig, std::uint8_t tint) {
    return static_cast<std::uint8_t>(
        std::lround(0.5 * orig + 0.5 * static_cast<double>(tint)));
  };
  RgbImage out = frame;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const ObjectId id = labels[p];
    const std::uint8_t* tint = nullptr;
    static constexpr std::uint8_t kGreen[3] = {0, 255, 0};
    static constexpr std::uint8_t kRed[3] = {255, 0, 0};
    if (std::find(top.begin(), top.end(), id) != top.end()) {
      tint = kGreen;
    } else if (std::find(bottom.begin(), bottom.end(), id) != bottom.end()) {
      tint = kRed;
    }
    if (tint == nullptr) continue;
    for (std::size_t ch = 0; ch < 3; ++ch) {
      out.pixels[p * 3 + ch] = blend(frame.pixels[p * 3 + ch], tint[ch]);
    }
  }
  return out;
}

void WritePng(const RgbImage& image, const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(
      std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw ValidationError("cannot write " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() +
                                             y * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace xsumx
