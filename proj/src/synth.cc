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

#include "xsumx/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "xsumx/io.h"
#include "xsumx/toy_oracles.h"

namespace xsumx {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kGrid = 4;
constexpr std::size_t kLargeCells = 4;

std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

std::uint8_t Pixel(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

void SynthConfig::Validate() const {
  if (videos == 0) throw ValidationError("synth: videos must be >= 1");
  if (fragments < 2) throw ValidationError("synth: fragments must be >= 2");
  if (min_fragment_length < 2 || max_fragment_length < min_fragment_length) {
    throw ValidationError("synth: need 2 <= min_length <= max_length");
  }
  if (height < kGrid || width < kGrid || height % kGrid || width % kGrid) {
    throw ValidationError("synth: frame size must be a positive multiple of 4");
  }
  if (small_objects < 1 || small_objects + kLargeCells > kGrid * kGrid) {
    throw ValidationError("synth: small_objects must be in [1, 12]");
  }
  if (!(planted_gain > 1.0)) {
    throw ValidationError("synth: planted_gain must exceed 1");
  }
}

SynthCorpus MakeSynthCorpus(const SynthConfig& cfg) {
  cfg.Validate();
  std::mt19937_64 rng(cfg.seed);
  const FeatureExtractor extractor = GridMeanExtractor(kGrid);
  const std::size_t cell_h = cfg.height / kGrid;
  const std::size_t cell_w = cfg.width / kGrid;
  SynthCorpus corpus;

  for (std::size_t v = 0; v < cfg.videos; ++v) {
    char name[32];
    std::snprintf(name, sizeof(name), "video_%02zu", v);

    std::vector<Fragment> fragments;
    std::size_t n = 0;
    for (std::size_t k = 0; k < cfg.fragments; ++k) {
      const std::size_t len =
          cfg.min_fragment_length +
          UniformIndex(rng, cfg.max_fragment_length - cfg.min_fragment_length + 1);
      fragments.push_back({n, n + len - 1});
      n += len;
    }
    const std::size_t planted = UniformIndex(rng, cfg.fragments);

    // Cell layout: a 2x2 block for the large object at a random corner of the
    // grid, small objects on random remaining cells, the rest void.
    const std::size_t n_objects = cfg.small_objects + 1;
    std::vector<ObjectId> ids(60);
    std::iota(ids.begin(), ids.end(), ObjectId{1});
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(n_objects);
    const ObjectId large = ids[0];

    std::vector<ObjectId> cell_label(kGrid * kGrid, kVoidObject);
    const std::size_t r0 = 2 * UniformIndex(rng, 2);
    const std::size_t c0 = 2 * UniformIndex(rng, 2);
    for (std::size_t dr = 0; dr < 2; ++dr) {
      for (std::size_t dc = 0; dc < 2; ++dc) {
        cell_label[(r0 + dr) * kGrid + c0 + dc] = large;
      }
    }
    std::vector<std::size_t> free_cells;
    for (std::size_t c = 0; c < cell_label.size(); ++c) {
      if (cell_label[c] == kVoidObject) free_cells.push_back(c);
    }
    std::shuffle(free_cells.begin(), free_cells.end(), rng);
    std::vector<double> small_level(n_objects, 0.0);
    for (std::size_t j = 1; j < n_objects; ++j) {
      cell_label[free_cells[j - 1]] = ids[j];
      small_level[j] = 24.0 + 4.0 * static_cast<double>(j);
    }
    // Dimmest small object: the lowest level, i.e. ids[1].
    const ObjectId weakest = ids[1];

    std::vector<ObjectId> labels(cfg.height * cfg.width);
    for (std::size_t y = 0; y < cfg.height; ++y) {
      for (std::size_t x = 0; x < cfg.width; ++x) {
        labels[y * cfg.width + x] =
            cell_label[(y / cell_h) * kGrid + x / cell_w];
      }
    }

    std::vector<std::uint8_t> pixels;
    pixels.reserve(n * cfg.height * cfg.width * 3);
    std::vector<ObjectId> all_labels;
    all_labels.reserve(n * labels.size());
    for (std::size_t k = 0; k < fragments.size(); ++k) {
      const Fragment& f = fragments[k];
      const double gain = k == planted ? cfg.planted_gain : 1.0;
      for (std::size_t i = f.start; i <= f.end; ++i) {
        const double background =
            20.0 + 60.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        const double within = static_cast<double>(i - f.start) /
                              static_cast<double>(f.length() - 1);
        const double large_level = 70.0 - 30.0 * within;
        for (ObjectId id : labels) {
          double level = background;
          if (id == large) {
            level = large_level;
          } else if (id != kVoidObject) {
            const auto j = static_cast<std::size_t>(
                std::find(ids.begin(), ids.end(), id) - ids.begin());
            level = small_level[j];
          }
          const std::uint8_t p = Pixel(gain * level);
          pixels.insert(pixels.end(), {p, p, p});
        }
        all_labels.insert(all_labels.end(), labels.begin(), labels.end());
      }
    }

    auto frames = std::make_shared<const RgbFrames>(n, cfg.height, cfg.width,
                                                    std::move(pixels));
    auto seg = std::make_shared<const SegmentationMaps>(
        n, cfg.height, cfg.width, std::move(all_labels));
    VideoBundle bundle{
        .video_id = name,
        .features = ExtractFeatures(extractor, *frames),
        .fragmentation = Fragmentation(fragments, n),
        .frames = frames,
        .segmentation = seg,
        .paths = {},
    };

    SynthTruth truth;
    truth.video_id = name;
    truth.n_frames = n;
    truth.planted_fragment = planted;
    truth.planted_object = large;
    truth.weakest_object = weakest;
    truth.objects = ids;
    std::sort(truth.objects.begin(), truth.objects.end());

    corpus.bundles.push_back(std::move(bundle));
    corpus.truth.push_back(std::move(truth));
  }
  return corpus;
}

Json ToJson(const SynthTruth& t) {
  return Json{{"video_id", t.video_id},
              {"n_frames", t.n_frames},
              {"planted_fragment", t.planted_fragment},
              {"planted_object", t.planted_object},
              {"weakest_object", t.weakest_object},
              {"objects", t.objects}};
}

Json GroundTruthJson(const SynthConfig& cfg, const SynthCorpus& corpus) {
  Json videos = Json::array();
  for (const SynthTruth& t : corpus.truth) videos.push_back(ToJson(t));
  return Json{{"seed", cfg.seed},
              {"fragments_per_video", cfg.fragments},
              {"planted_gain", cfg.planted_gain},
              {"videos", videos}};
}

void WriteSynthCorpus(SynthCorpus* corpus, const SynthConfig& cfg,
                      const fs::path& dir) {
  fs::create_directories(dir);
  for (VideoBundle& b : corpus->bundles) {
    const fs::path vdir = dir / b.video_id;
    fs::create_directories(vdir);
    SaveFeatures(b.features, vdir / kFeaturesFile);
    SaveFragments(b.fragmentation, vdir / kFragmentsFile);
    SaveFrames(*b.frames, vdir / kFramesFile);
    SaveSegmentation(*b.segmentation, vdir / kSegmentationFile);
    b.paths.features = fs::absolute(vdir / kFeaturesFile).string();
    b.paths.frames = fs::absolute(vdir / kFramesFile).string();
    b.paths.segmentation = fs::absolute(vdir / kSegmentationFile).string();
  }
  WriteTextFile(dir / "ground_truth.json",
                DumpJson(GroundTruthJson(cfg, *corpus)));
}

}  // namespace xsumx
