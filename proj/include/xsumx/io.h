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

#ifndef XSUMX_IO_H_
#define XSUMX_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xsumx/types.h"

namespace xsumx {

// Binary containers: 4-byte ASCII magic, u32 version (=1), u32 shape fields,
// then a little-endian payload. Loaders throw FormatError with the byte
// offset of the first problem; savers overwrite `path`.
//
//   XSFM  n_frames dim             f32[n_frames*dim]
//   XSSG  n_frames height width    u16[n_frames*height*width]
//   XSFR  n_frames height width    u8[n_frames*height*width*3]  (RGB)
inline constexpr std::uint32_t kFormatVersion = 1;

FrameFeatures LoadFeatures(const std::filesystem::path& path);
void SaveFeatures(const FrameFeatures& features,
                  const std::filesystem::path& path);

SegmentationMaps LoadSegmentation(const std::filesystem::path& path);
void SaveSegmentation(const SegmentationMaps& maps,
                      const std::filesystem::path& path);

RgbFrames LoadFrames(const std::filesystem::path& path);
void SaveFrames(const RgbFrames& frames, const std::filesystem::path& path);

// Fragments file: JSON array of [start, end] pairs, inclusive and 0-based.
// Throws ValidationError for gaps/overlaps/coverage, FormatError for bad JSON.
Fragmentation LoadFragments(const std::filesystem::path& path,
                            std::size_t n_frames);
// Raw pairs without validation.
std::vector<Fragment> ReadFragmentPairs(const std::filesystem::path& path);
void SaveFragments(const Fragmentation& fragmentation,
                   const std::filesystem::path& path);

// Byte-level helpers shared by the loaders and tests.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& bytes);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

// Corpus layout: one sub-directory per video (directory name = video_id)
// holding features.xsfm and optionally fragments.json, frames.xsfr,
// segmentation.xssg.
inline constexpr const char* kFeaturesFile = "features.xsfm";
inline constexpr const char* kFragmentsFile = "fragments.json";
inline constexpr const char* kFramesFile = "frames.xsfr";
inline constexpr const char* kSegmentationFile = "segmentation.xssg";

// Sorted video directory names under `corpus_dir`.
std::vector<std::string> ListCorpus(const std::filesystem::path& corpus_dir);

}  // namespace xsumx

#endif  // XSUMX_IO_H_
