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

#include "xsumx/bundle.h"

#include "xsumx/io.h"

namespace xsumx {

namespace fs = std::filesystem;

VideoBundle LoadBundle(const fs::path& video_dir,
                       const FragmenterConfig& fragmenter) {
  const fs::path features_path = video_dir / kFeaturesFile;
  if (!fs::exists(features_path)) {
    throw ValidationError("missing features file " + features_path.string());
  }
  FrameFeatures features = LoadFeatures(features_path);
  const fs::path fragments_path = video_dir / kFragmentsFile;
  Fragmentation fragmentation =
      fs::exists(fragments_path)
          ? LoadFragments(fragments_path, features.n_frames())
          : SubdivideIfNeeded(DetectShots(features, fragmenter), fragmenter);

  VideoBundle bundle{
      .video_id = video_dir.filename().string(),
      .features = std::move(features),
      .fragmentation = std::move(fragmentation),
      .frames = nullptr,
      .segmentation = nullptr,
      .paths = {},
  };
  bundle.paths.features = fs::absolute(features_path).string();
  if (fs::path p = video_dir / kFramesFile; fs::exists(p)) {
    bundle.frames = std::make_shared<const RgbFrames>(LoadFrames(p));
    bundle.paths.frames = fs::absolute(p).string();
  }
  if (fs::path p = video_dir / kSegmentationFile; fs::exists(p)) {
    bundle.segmentation =
        std::make_shared<const SegmentationMaps>(LoadSegmentation(p));
    bundle.paths.segmentation = fs::absolute(p).string();
  }
  return bundle;
}

Findings ValidateBundle(const VideoBundle& bundle) {
  Findings out;
  const std::size_t n = bundle.n_frames();
  if (bundle.fragmentation.n_frames() != n) {
    out.push_back({"fragmentation",
                   "covers frames [0, " +
                       std::to_string(bundle.fragmentation.n_frames() - 1) +
                       "] but the video has " + std::to_string(n) +
                       " frames"});
  }
  if (bundle.frames && bundle.frames->n_frames() != n) {
    out.push_back({"frames", std::to_string(bundle.frames->n_frames()) +
                                 " frames, features have " +
                                 std::to_string(n)});
  }
  if (bundle.segmentation) {
    if (bundle.segmentation->n_frames() != n) {
      out.push_back({"segmentation",
                     std::to_string(bundle.segmentation->n_frames()) +
                         " frames, features have " + std::to_string(n)});
    }
    if (bundle.frames &&
        (bundle.frames->height() != bundle.segmentation->height() ||
         bundle.frames->width() != bundle.segmentation->width())) {
      out.push_back({"segmentation",
                     "label grid size differs from frame size"});
    }
  }
  return out;
}

}  // namespace xsumx
