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

#ifndef XSUMX_OBJECT_EXPLAINER_H_
#define XSUMX_OBJECT_EXPLAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "xsumx/explanation.h"
#include "xsumx/lime.h"
#include "xsumx/oracle.h"

namespace xsumx {

enum class SelectionSource { kFromExplanation, kFromSummarizer };

const char* SelectionSourceName(SelectionSource source);

struct FragmentSelection {
  SelectionSource source = SelectionSource::kFromSummarizer;
  std::vector<std::size_t> fragment_indices;  // at most k, distinct
};

// Top-k fragments by mean baseline score, ties to the lower index.
FragmentSelection SelectFragmentsBySummarizer(const ScoreSequence& baseline,
                                              const Fragmentation& frag,
                                              std::size_t k = kTopK);

// The explanation's top-k fragments.
FragmentSelection SelectFragmentsFromExplanation(
    const FragmentExplanation& explanation, std::size_t k = kTopK);

// Highest-scoring frame inside `fragment`; ties go to the earliest frame.
std::size_t SelectKeyframe(const ScoreSequence& baseline,
                           const Fragment& fragment);

// Distinct non-void IDs in the keyframe covering at least
// min_area_fraction of its pixels, ascending.
std::vector<ObjectId> EnumerateObjects(const SegmentationMaps& seg,
                                       std::size_t keyframe,
                                       double min_area_fraction = 0.0);

struct ObjectExplainOptions {
  LimeConfig lime = LimeConfig::ObjectDefaults();
  double min_area_fraction = 0.0;
  std::size_t workers = 1;
};

// Object-level LIME inside one fragment. Mask bits range over the
// keyframe's objects; each row masks the 0-bit objects in every frame of the
// fragment, and the regression target is the mean score over the fragment's
// frames only. Returns nullopt with a finding when the video has no
// segmentation or the keyframe holds fewer than two objects. `baseline` is
// computed from the oracle when not supplied.
std::optional<ObjectExplanation> LimeObjectExplain(
    const Oracle& oracle, const VideoBundle& bundle, std::size_t fragment_index,
    const ObjectExplainOptions& options, Findings* findings,
    const ScoreSequence* baseline = nullptr);

// 8-bit interleaved RGB image.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const RgbImage&) const = default;
};

RgbImage FrameImage(const RgbFrames& frames, std::size_t index);

// Blends the pixels of `top` IDs 50/50 with pure green and those of
// `bottom` IDs with pure red; other pixels are copied. An ID listed in both
// is drawn green and reported as a finding. Throws ValidationError on a
// size mismatch.
RgbImage RenderOverlay(const RgbImage& frame, std::span<const ObjectId> labels,
                       std::span<const ObjectId> top,
                       std::span<const ObjectId> bottom, Findings* findings);

// Writes an 8-bit RGB PNG.
void WritePng(const RgbImage& image, const std::filesystem::path& path);

}  // namespace xsumx

#endif  // XSUMX_OBJECT_EXPLAINER_H_
