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

#include "xsumx/types.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xsumx {
namespace {

template <typename T>
void SortUnique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

FrameFeatures::FrameFeatures(std::size_t n_frames, std::size_t dim,
                             std::vector<float> data)
    : n_frames_(n_frames), dim_(dim), data_(std::move(data)) {
  if (n_frames_ == 0 || dim_ == 0) {
    throw ValidationError("features: n_frames and dim must be >= 1");
  }
  if (data_.size() != n_frames_ * dim_) {
    throw ValidationError("features: data size does not match shape");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ValidationError("features: non-finite value at frame " +
                            std::to_string(i / dim_));
    }
  }
}

FrameFeatures FrameFeatures::WithZeroedFrames(
    std::span<const std::size_t> frames) const {
  std::vector<float> data = data_;
  for (std::size_t f : frames) {
    std::fill_n(data.begin() + static_cast<std::ptrdiff_t>(f * dim_), dim_,
                0.0f);
  }
  return FrameFeatures(n_frames_, dim_, std::move(data));
}

std::string CheckFragments(const std::vector<Fragment>& fragments,
                           std::size_t n_frames) {
  if (n_frames == 0) return "fragmentation: video has no frames";
  if (fragments.empty()) return "fragmentation: no fragments";
  if (fragments.front().start != 0) {
    return "fragmentation: first fragment starts at " +
           std::to_string(fragments.front().start) + ", expected 0";
  }
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const Fragment& f = fragments[i];
    if (f.start > f.end) {
      return "fragmentation: fragment " + std::to_string(i) +
             " has start > end";
    }
    if (i + 1 < fragments.size()) {
      const Fragment& next = fragments[i + 1];
      if (next.start > f.end + 1) {
        return "fragmentation: gap after fragment " + std::to_string(i) +
               " (fragments " + std::to_string(i) + " and " +
               std::to_string(i + 1) + ")";
      }
      if (next.start <= f.end) {
        return "fragmentation: overlap between fragments " +
               std::to_string(i) + " and " + std::to_string(i + 1);
      }
    }
  }
  if (fragments.back().end != n_frames - 1) {
    return "fragmentation: last fragment ends at " +
           std::to_string(fragments.back().end) + ", expected " +
           std::to_string(n_frames - 1);
  }
  return {};
}

Fragmentation::Fragmentation(std::vector<Fragment> fragments,
                             std::size_t n_frames)
    : fragments_(std::move(fragments)), n_frames_(n_frames) {
  if (std::string err = CheckFragments(fragments_, n_frames_); !err.empty()) {
    throw ValidationError(err);
  }
}

std::size_t Fragmentation::FragmentOf(std::size_t frame) const {
  auto it = std::upper_bound(
      fragments_.begin(), fragments_.end(), frame,
      [](std::size_t f, const Fragment& frag) { return f < frag.start; });
  return static_cast<std::size_t>(it - fragments_.begin()) - 1;
}

std::vector<std::size_t> Fragmentation::FramesOf(
    std::span<const std::size_t> fragment_indices) const {
  std::vector<std::size_t> frames;
  for (std::size_t k : fragment_indices) {
    for (std::size_t f = fragments_[k].start; f <= fragments_[k].end; ++f) {
      frames.push_back(f);
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

RgbFrames::RgbFrames(std::size_t n_frames, std::size_t height,
                     std::size_t width, std::vector<std::uint8_t> pixels)
    : n_frames_(n_frames),
      height_(height),
      width_(width),
      pixels_(std::move(pixels)) {
  if (n_frames_ == 0 || height_ == 0 || width_ == 0) {
    throw ValidationError("frames: empty shape");
  }
  if (pixels_.size() != n_frames_ * height_ * width_ * 3) {
    throw ValidationError("frames: pixel buffer does not match shape");
  }
}

SegmentationMaps::SegmentationMaps(std::size_t n_frames, std::size_t height,
                                   std::size_t width,
                                   std::vector<ObjectId> labels)
    : n_frames_(n_frames),
      height_(height),
      width_(width),
      labels_(std::move(labels)) {
  if (n_frames_ == 0 || height_ == 0 || width_ == 0) {
    throw ValidationError("segmentation: empty shape");
  }
  if (labels_.size() != n_frames_ * height_ * width_) {
    throw ValidationError("segmentation: label buffer does not match shape");
  }
}

PerturbationSpec PerturbationSpec::None() { return {}; }

PerturbationSpec PerturbationSpec::Fragments(
    std::vector<std::size_t> fragments) {
  PerturbationSpec spec;
  spec.kind = Kind::kFragments;
  SortUnique(fragments);
  spec.masked_fragments = std::move(fragments);
  return spec;
}

PerturbationSpec PerturbationSpec::Objects(std::size_t fragment,
                                           std::vector<ObjectId> objects) {
  PerturbationSpec spec;
  spec.kind = Kind::kObjects;
  spec.target_fragment = fragment;
  SortUnique(objects);
  spec.masked_objects = std::move(objects);
  return spec;
}

const char* KindName(PerturbationSpec::Kind kind) {
  switch (kind) {
    case PerturbationSpec::Kind::kNone:
      return "none";
    case PerturbationSpec::Kind::kFragments:
      return "fragments";
    case PerturbationSpec::Kind::kObjects:
      return "objects";
  }
  return "?";
}

void ValidateSpec(const PerturbationSpec& spec, const VideoBundle& bundle) {
  const std::size_t n_fragments = bundle.fragmentation.size();
  switch (spec.kind) {
    case PerturbationSpec::Kind::kNone:
      if (!spec.masked_fragments.empty() || !spec.masked_objects.empty()) {
        throw ValidationError("perturbation: kind=none with non-empty mask sets");
      }
      return;
    case PerturbationSpec::Kind::kFragments:
      if (spec.masked_fragments.empty()) {
        throw ValidationError("perturbation: empty fragment mask");
      }
      for (std::size_t k : spec.masked_fragments) {
        if (k >= n_fragments) {
          throw ValidationError("perturbation: fragment index " + std::to_string(k) +
                                " out of range");
        }
      }
      return;
    case PerturbationSpec::Kind::kObjects:
      if (spec.masked_objects.empty()) {
        throw ValidationError("perturbation: empty object mask");
      }
      if (spec.target_fragment >= n_fragments) {
        throw ValidationError("perturbation: target fragment " +
                              std::to_string(spec.target_fragment) +
                              " out of range");
      }
      if (!bundle.segmentation) {
        throw ValidationError("perturbation: object masks need segmentation maps for " +
                              bundle.video_id);
      }
      return;
  }
}

bool CheckScores(const ScoreSequence& scores, std::size_t n_frames,
                 Findings* findings) {
  if (scores.size() != n_frames) {
    AddFinding(findings, "scores",
               "length " + std::to_string(scores.size()) + " != n_frames " +
                   std::to_string(n_frames));
    return false;
  }
  bool ok = true;
  std::size_t out_of_range = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      AddFinding(findings, "scores",
                 "non-finite score at frame " + std::to_string(i));
      ok = false;
    } else if (scores[i] < 0.0 || scores[i] > 1.0) {
      ++out_of_range;
    }
  }
  if (out_of_range > 0) {
    AddFinding(findings, "scores",
               std::to_string(out_of_range) + " score(s) outside [0,1]");
  }
  return ok;
}

}  // namespace xsumx
