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

#ifndef XSUMX_SYNTH_H_
#define XSUMX_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xsumx/explanation.h"
#include "xsumx/types.h"

namespace xsumx {

// Planted-influence corpus. Each video is a sequence of grey RGB frames whose
// background brightens with the frame index; one fragment is rendered at
// several times the brightness of the rest. Frames carry a static 4x4 block
// segmentation: a large object whose brightness falls inside every fragment,
// and small objects of constant, distinct brightness.
struct SynthConfig {
  std::size_t videos = 20;
  std::size_t fragments = 12;
  std::size_t min_fragment_length = 6;
  std::size_t max_fragment_length = 10;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t small_objects = 5;
  double planted_gain = 3.0;
  std::uint64_t seed = 7;

  void Validate() const;  // throws ValidationError
};

struct SynthTruth {
  std::string video_id;
  std::size_t n_frames = 0;
  std::size_t planted_fragment = 0;
  ObjectId planted_object = 0;
  ObjectId weakest_object = 0;
  std::vector<ObjectId> objects;  // ascending
};

struct SynthCorpus {
  std::vector<VideoBundle> bundles;
  std::vector<SynthTruth> truth;
};

SynthCorpus MakeSynthCorpus(const SynthConfig& cfg);

Json ToJson(const SynthTruth& truth);
Json GroundTruthJson(const SynthConfig& cfg, const SynthCorpus& corpus);

// Writes one sub-directory per video plus ground_truth.json. Source paths of
// the returned bundles point into `dir`.
void WriteSynthCorpus(SynthCorpus* corpus, const SynthConfig& cfg,
                      const std::filesystem::path& dir);

}  // namespace xsumx

#endif  // XSUMX_SYNTH_H_
