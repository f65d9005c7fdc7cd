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

#include "xsumx/io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace xsumx {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMagicSize = 4;

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  void ExpectMagic(const char* magic) {
    Need(kMagicSize, "magic");
    if (std::memcmp(bytes_.data(), magic, kMagicSize) != 0) {
      throw FormatError(what_ + ": bad magic, expected \"" +
                            std::string(magic) + "\"",
                        0);
    }
    pos_ += kMagicSize;
  }

  std::uint32_t U32(const char* field) {
    Need(4, field);
    std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                      static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8 |
                      static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16 |
                      static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }

  std::uint16_t U16() {
    std::uint16_t v = static_cast<std::uint16_t>(
        bytes_[pos_] | static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8);
    pos_ += 2;
    return v;
  }

  float F32() {
    std::uint32_t bits = static_cast<std::uint32_t>(bytes_[pos_]) |
                         static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8 |
                         static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16 |
                         static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24;
    float v = std::bit_cast<float>(bits);
    if (!std::isfinite(v)) {
      throw FormatError(what_ + ": non-finite value", pos_);
    }
    pos_ += 4;
    return v;
  }

  std::uint8_t U8() { return bytes_[pos_++]; }

  void ExpectVersion() {
    const std::size_t at = pos_;
    if (std::uint32_t v = U32("version"); v != kFormatVersion) {
      throw FormatError(what_ + ": unsupported version " + std::to_string(v),
                        at);
    }
  }

  // Checks that exactly `n` payload bytes remain.
  void ExpectPayload(std::uint64_t n) {
    const std::uint64_t remaining = bytes_.size() - pos_;
    if (remaining < n) {
      throw FormatError(what_ + ": truncated payload, expected " +
                            std::to_string(n) + " bytes, found " +
                            std::to_string(remaining),
                        bytes_.size());
    }
    if (remaining > n) {
      throw FormatError(what_ + ": trailing bytes after payload", pos_ + n);
    }
  }

  std::size_t pos() const { return pos_; }

 private:
  void Need(std::size_t n, const char* field) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(what_ + ": truncated header reading " + field,
                        bytes_.size());
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  void Magic(const char* magic) {
    bytes_.insert(bytes_.end(), magic, magic + kMagicSize);
  }
  void U32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) bytes_.push_back((v >> s) & 0xff);
  }
  void U16(std::uint16_t v) {
    bytes_.push_back(v & 0xff);
    bytes_.push_back(v >> 8);
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void U8(std::uint8_t v) { bytes_.push_back(v); }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

std::uint32_t CheckedU32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) {
    throw ValidationError(std::string(what) + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(v);
}

std::uint32_t ReadNonZero(ByteReader& r, const char* field,
                          const std::string& what) {
  const std::size_t at = r.pos();
  std::uint32_t v = r.U32(field);
  if (v == 0) throw FormatError(what + ": " + field + " is zero", at);
  return v;
}

}  // namespace

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteFileBytes(const fs::path& path,
                    const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed for " + path.string());
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

FrameFeatures LoadFeatures(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  const std::string what = "features file " + path.string();
  ByteReader r(bytes, what);
  r.ExpectMagic("XSFM");
  r.ExpectVersion();
  const std::uint32_t n = ReadNonZero(r, "n_frames", what);
  const std::uint32_t dim = ReadNonZero(r, "dim", what);
  const std::uint64_t count = std::uint64_t{n} * dim;
  r.ExpectPayload(count * 4);
  std::vector<float> data(count);
  for (float& v : data) v = r.F32();
  return FrameFeatures(n, dim, std::move(data));
}

void SaveFeatures(const FrameFeatures& features, const fs::path& path) {
  ByteWriter w(16 + features.data().size() * 4);
  w.Magic("XSFM");
  w.U32(kFormatVersion);
  w.U32(CheckedU32(features.n_frames(), "n_frames"));
  w.U32(CheckedU32(features.dim(), "dim"));
  for (float v : features.data()) w.F32(v);
  WriteFileBytes(path, w.bytes());
}

SegmentationMaps LoadSegmentation(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  const std::string what = "segmentation file " + path.string();
  ByteReader r(bytes, what);
  r.ExpectMagic("XSSG");
  r.ExpectVersion();
  const std::uint32_t n = ReadNonZero(r, "n_frames", what);
  const std::uint32_t h = ReadNonZero(r, "height", what);
  const std::uint32_t w = ReadNonZero(r, "width", what);
  const std::uint64_t count = std::uint64_t{n} * h * w;
  r.ExpectPayload(count * 2);
  std::vector<ObjectId> labels(count);
  for (ObjectId& v : labels) v = r.U16();
  return SegmentationMaps(n, h, w, std::move(labels));
}

void SaveSegmentation(const SegmentationMaps& maps, const fs::path& path) {
  ByteWriter w(20 + maps.labels().size() * 2);
  w.Magic("XSSG");
  w.U32(kFormatVersion);
  w.U32(CheckedU32(maps.n_frames(), "n_frames"));
  w.U32(CheckedU32(maps.height(), "height"));
  w.U32(CheckedU32(maps.width(), "width"));
  for (ObjectId v : maps.labels()) w.U16(v);
  WriteFileBytes(path, w.bytes());
}

RgbFrames LoadFrames(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  const std::string what = "frames file " + path.string();
  ByteReader r(bytes, what);
  r.ExpectMagic("XSFR");
  r.ExpectVersion();
  const std::uint32_t n = ReadNonZero(r, "n_frames", what);
  const std::uint32_t h = ReadNonZero(r, "height", what);
  const std::uint32_t w = ReadNonZero(r, "width", what);
  const std::uint64_t count = std::uint64_t{n} * h * w * 3;
  r.ExpectPayload(count);
  std::vector<std::uint8_t> pixels(bytes.begin() + r.pos(), bytes.end());
  return RgbFrames(n, h, w, std::move(pixels));
}

void SaveFrames(const RgbFrames& frames, const fs::path& path) {
  ByteWriter w(20 + frames.pixels().size());
  w.Magic("XSFR");
  w.U32(kFormatVersion);
  w.U32(CheckedU32(frames.n_frames(), "n_frames"));
  w.U32(CheckedU32(frames.height(), "height"));
  w.U32(CheckedU32(frames.width(), "width"));
  for (std::uint8_t v : frames.pixels()) w.U8(v);
  WriteFileBytes(path, w.bytes());
}

std::vector<Fragment> ReadFragmentPairs(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("fragments file " + path.string() + ": " + e.what(),
                      e.byte);
  }
  if (!doc.is_array()) {
    throw FormatError("fragments file " + path.string() + ": not an array",
                      0);
  }
  std::vector<Fragment> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& pair = doc[i];
    if (!pair.is_array() || pair.size() != 2 ||
        !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned()) {
      throw FormatError("fragments file " + path.string() + ": entry " +
                            std::to_string(i) +
                            " is not a [start, end] pair of non-negative "
                            "integers",
                        0);
    }
    out.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  return out;
}

Fragmentation LoadFragments(const fs::path& path, std::size_t n_frames) {
  return Fragmentation(ReadFragmentPairs(path), n_frames);
}

void SaveFragments(const Fragmentation& fragmentation, const fs::path& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Fragment& f : fragmentation.fragments()) {
    doc.push_back({f.start, f.end});
  }
  WriteTextFile(path, doc.dump() + "\n");
}

std::vector<std::string> ListCorpus(const fs::path& corpus_dir) {
  if (!fs::is_directory(corpus_dir)) {
    throw ValidationError("corpus directory not found: " +
                          corpus_dir.string());
  }
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_directory() &&
        fs::exists(entry.path() / kFeaturesFile)) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace xsumx
