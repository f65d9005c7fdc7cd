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

#ifndef XSUMX_TYPES_H_
#define XSUMX_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xsumx/errors.h"

namespace xsumx {

// Per-frame importance scores, one per frame. Nominally in [0,1].
using ScoreSequence = std::vector<double>;

using ObjectId = std::uint16_t;

// Object ID 0 marks void/unlabeled pixels.
inline constexpr ObjectId kVoidObject = 0;

// Dense n_frames x dim matrix of frame descriptors, row-major.
class FrameFeatures {
 public:
  // Throws ValidationError on empty shape, size mismatch or non-finite data.
  FrameFeatures(std::size_t n_frames, std::size_t dim, std::vector<float> data);

  std::size_t n_frames() const { return n_frames_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> data() const { return data_; }
  std::span<const float> row(std::size_t frame) const {
    return std::span<const float>(data_).subspan(frame * dim_, dim_);
  }

  // Copy with the given frames replaced by the zero vector.
  FrameFeatures WithZeroedFrames(std::span<const std::size_t> frames) const;

  bool operator==(const FrameFeatures&) const = default;

 private:
  std::size_t n_frames_;
  std::size_t dim_;
  std::vector<float> data_;
};

// Inclusive frame range [start, end].
struct Fragment {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool Contains(std::size_t frame) const {
    return frame >= start && frame <= end;
  }
  bool operator==(const Fragment&) const = default;
};

// Ordered partition of [0, n_frames-1] into contiguous fragments.
class Fragmentation {
 public:
  // Throws ValidationError naming the offending fragment pair on gaps or
  // overlaps, and on incomplete coverage of [0, n_frames-1].
  Fragmentation(std::vector<Fragment> fragments, std::size_t n_frames);

  std::size_t size() const { return fragments_.size(); }
  std::size_t n_frames() const { return n_frames_; }
  const Fragment& operator[](std::size_t i) const { return fragments_[i]; }
  const std::vector<Fragment>& fragments() const { return fragments_; }

  // Index of the fragment holding `frame`.
  std::size_t FragmentOf(std::size_t frame) const;

  // All frames covered by the given fragment indices, ascending.
  std::vector<std::size_t> FramesOf(
      std::span<const std::size_t> fragment_indices) const;

  bool operator==(const Fragmentation&) const = default;

 private:
  std::vector<Fragment> fragments_;
  std::size_t n_frames_;
};

// Checks contiguity/coverage without constructing. Empty string when valid.
std::string CheckFragments(const std::vector<Fragment>& fragments,
                           std::size_t n_frames);

// Raw RGB frames, interleaved 8-bit, row-major per frame.
class RgbFrames {
 public:
  RgbFrames(std::size_t n_frames, std::size_t height, std::size_t width,
            std::vector<std::uint8_t> pixels);

  std::size_t n_frames() const { return n_frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t frame_size() const { return height_ * width_ * 3; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<const std::uint8_t> frame(std::size_t i) const {
    return std::span<const std::uint8_t>(pixels_).subspan(i * frame_size(),
                                                          frame_size());
  }

  bool operator==(const RgbFrames&) const = default;

 private:
  std::size_t n_frames_;
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> pixels_;
};

// Per-frame object-ID grids. IDs are assumed temporally consistent.
class SegmentationMaps {
 public:
  SegmentationMaps(std::size_t n_frames, std::size_t height, std::size_t width,
                   std::vector<ObjectId> labels);

  std::size_t n_frames() const { return n_frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t frame_size() const { return height_ * width_; }
  std::span<const ObjectId> labels() const { return labels_; }
  std::span<const ObjectId> frame(std::size_t i) const {
    return std::span<const ObjectId>(labels_).subspan(i * frame_size(),
                                                      frame_size());
  }

  bool operator==(const SegmentationMaps&) const = default;

 private:
  std::size_t n_frames_;
  std::size_t height_;
  std::size_t width_;
  std::vector<ObjectId> labels_;
};

// What a perturbation masks out. Index sets are kept sorted and unique.
struct PerturbationSpec {
  enum class Kind { kNone, kFragments, kObjects };

  Kind kind = Kind::kNone;
  std::vector<std::size_t> masked_fragments;
  std::size_t target_fragment = 0;
  std::vector<ObjectId> masked_objects;

  static PerturbationSpec None();
  static PerturbationSpec Fragments(std::vector<std::size_t> fragments);
  static PerturbationSpec Objects(std::size_t fragment,
                                  std::vector<ObjectId> objects);

  bool operator==(const PerturbationSpec&) const = default;
};

const char* KindName(PerturbationSpec::Kind kind);

// Where a bundle was loaded from; forwarded to external oracles.
struct SourcePaths {
  std::string features;
  std::string frames;
  std::string segmentation;
};

// Everything known about one video. Frames and segmentation are optional and
// shared immutably between copies.
struct VideoBundle {
  std::string video_id;
  FrameFeatures features;
  Fragmentation fragmentation;
  std::shared_ptr<const RgbFrames> frames;
  std::shared_ptr<const SegmentationMaps> segmentation;
  SourcePaths paths;

  std::size_t n_frames() const { return features.n_frames(); }
};

// Throws ValidationError if `spec` does not fit `bundle`.
void ValidateSpec(const PerturbationSpec& spec, const VideoBundle& bundle);

// Appends a warning per out-of-range or non-finite score. Returns false if
// the sequence is unusable (wrong length or non-finite values).
bool CheckScores(const ScoreSequence& scores, std::size_t n_frames,
                 Findings* findings);

}  // namespace xsumx

#endif  // XSUMX_TYPES_H_
