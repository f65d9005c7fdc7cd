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

#ifndef XSUMX_EXTERNAL_ORACLE_H_
#define XSUMX_EXTERNAL_ORACLE_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "xsumx/oracle.h"

namespace xsumx {

inline constexpr int kProtocolVersion = 1;

// Bidirectional newline-delimited text channel.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // `line` must not contain '\n'. Throws OracleError on failure.
  virtual void WriteLine(const std::string& line) = 0;
  // nullopt at end of stream.
  virtual std::optional<std::string> ReadLine() = 0;
};

// Channel over a pair of file descriptors (possibly the same socket).
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd, bool owns_fds);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void WriteLine(const std::string& line) override;
  std::optional<std::string> ReadLine() override;

  // Closes the write side (signals EOF to the peer).
  void CloseWrite();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  std::string buffer_;
};

// Client side of the oracle wire protocol:
//   -> {"op":"hello","proto":1}
//   <- {"op":"hello","proto":1,"caps":{...}}
//   -> {"op":"load","id":n,"video_id":...,"features_path":...,
//       "frames_path":...|null,"segmentation_path":...|null}
//   <- {"op":"ok","id":n}
//   -> {"op":"score","id":n,"video_id":...,"spec":{...}[,"fragments":[[s,e],...]]}
//   <- {"op":"scores","id":n,"scores":[...]}
//   -> {"op":"attention","id":n,"video_id":...}
//   <- {"op":"attention","id":n,"diag":[...]}
//   <- {"op":"error","id":n,"message":...} on failure.
// Videos are loaded lazily from the bundle's source paths; fragment
// boundaries accompany the first score request of each video. Requests from
// concurrent callers are serialized; each response must echo its request id.
class ExternalOracle : public Oracle {
 public:
  // Performs the hello exchange. Throws OracleError on protocol mismatch.
  explicit ExternalOracle(std::unique_ptr<LineChannel> channel,
                          std::string description = "external oracle");
  ~ExternalOracle() override;

  // Runs `command` through /bin/sh with its stdin/stdout as the channel.
  static std::unique_ptr<ExternalOracle> Spawn(const std::string& command);
  // Connects to "host:port".
  static std::unique_ptr<ExternalOracle> Connect(const std::string& address);

  OracleCapabilities capabilities() const override { return caps_; }

  // Encodings used on the wire.
  static nlohmann::ordered_json SpecToJson(const PerturbationSpec& spec);
  static nlohmann::ordered_json CapsToJson(const OracleCapabilities& caps);
  static OracleCapabilities CapsFromJson(const nlohmann::ordered_json& j);

 protected:
  ScoreSequence DoScore(const VideoBundle& bundle,
                        const PerturbationSpec& spec) const override;
  AttentionDiagonal DoAttention(const VideoBundle& bundle) const override;

 private:
  // Caller holds mu_.
  nlohmann::ordered_json RoundTrip(nlohmann::ordered_json request) const;
  void EnsureLoaded(const VideoBundle& bundle) const;
  std::vector<double> NumberArray(const nlohmann::ordered_json& response,
                                  const char* field) const;

  std::unique_ptr<LineChannel> channel_;
  std::string description_;
  OracleCapabilities caps_;
  int child_pid_ = -1;

  mutable std::mutex mu_;
  mutable std::uint64_t next_id_ = 1;
  mutable std::set<std::string> loaded_;
  mutable std::set<std::string> fragments_sent_;
};

}  // namespace xsumx

#endif  // XSUMX_EXTERNAL_ORACLE_H_
