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

#include "xsumx/external_oracle.h"

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

namespace xsumx {

using json = nlohmann::ordered_json;

namespace {

void IgnoreSigpipe() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

json NullableString(const std::string& s) {
  return s.empty() ? json(nullptr) : json(s);
}

}  // namespace

// FdChannel

FdChannel::FdChannel(int read_fd, int write_fd, bool owns_fds)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns_fds) {
  IgnoreSigpipe();
}

FdChannel::~FdChannel() {
  if (!owns_) return;
  CloseWrite();
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdChannel::CloseWrite() {
  if (write_fd_ < 0) return;
  if (write_fd_ == read_fd_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else if (owns_) {
    ::close(write_fd_);
  }
  write_fd_ = -1;
}

void FdChannel::WriteLine(const std::string& line) {
  if (write_fd_ < 0) throw OracleError("channel closed for writing");
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::write(write_fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("write to oracle failed: ") +
                        std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdChannel::ReadLine() {
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("read from oracle failed: ") +
                        std::strerror(errno));
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ExternalOracle

ExternalOracle::ExternalOracle(std::unique_ptr<LineChannel> channel,
                               std::string description)
    : channel_(std::move(channel)), description_(std::move(description)) {
  std::lock_guard<std::mutex> lock(mu_);
  channel_->WriteLine(json{{"op", "hello"}, {"proto", kProtocolVersion}}.dump());
  const auto line = channel_->ReadLine();
  if (!line) throw OracleError(description_ + ": closed during hello");
  json reply;
  try {
    reply = json::parse(*line);
  } catch (const json::parse_error&) {
    throw OracleError(description_ + ": malformed hello reply");
  }
  if (reply.value("op", "") != "hello") {
    throw OracleError(description_ + ": expected hello, got " + *line);
  }
  if (reply.value("proto", -1) != kProtocolVersion) {
    throw OracleError(description_ + ": unsupported protocol version");
  }
  caps_ = CapsFromJson(reply.at("caps"));
}

ExternalOracle::~ExternalOracle() {
  channel_.reset();
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
  }
}

std::unique_ptr<ExternalOracle> ExternalOracle::Spawn(
    const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw OracleError("pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw OracleError("pipe() failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw OracleError("fork() failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(),
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  auto channel =
      std::make_unique<FdChannel>(from_child[0], to_child[1], /*owns_fds=*/true);
  try {
    auto oracle = std::make_unique<ExternalOracle>(std::move(channel),
                                                   "oracle `" + command + "`");
    oracle->child_pid_ = pid;
    return oracle;
  } catch (...) {
    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    throw;
  }
}

std::unique_ptr<ExternalOracle> ExternalOracle::Connect(
    const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw OracleError("tcp oracle address must be host:port, got " + address);
  }
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res);
      rc != 0) {
    throw OracleError("cannot resolve " + address + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw OracleError("cannot connect to oracle at " + address);
  return std::make_unique<ExternalOracle>(
      std::make_unique<FdChannel>(fd, fd, /*owns_fds=*/true),
      "oracle tcp:" + address);
}

json ExternalOracle::SpecToJson(const PerturbationSpec& spec) {
  switch (spec.kind) {
    case PerturbationSpec::Kind::kNone:
      return json{{"kind", "none"}};
    case PerturbationSpec::Kind::kFragments:
      return json{{"kind", "fragments"},
                  {"masked_fragments", spec.masked_fragments}};
    case PerturbationSpec::Kind::kObjects:
      return json{{"kind", "objects"},
                  {"fragment", spec.target_fragment},
                  {"masked_objects", spec.masked_objects}};
  }
  return json();
}

json ExternalOracle::CapsToJson(const OracleCapabilities& caps) {
  return json{{"fragment_masks", caps.fragment_masks},
              {"object_masks", caps.object_masks},
              {"attention", caps.attention},
              {"batch_limit", caps.batch_limit}};
}

OracleCapabilities ExternalOracle::CapsFromJson(const json& j) {
  try {
    OracleCapabilities caps;
    caps.fragment_masks = j.at("fragment_masks").get<bool>();
    caps.object_masks = j.at("object_masks").get<bool>();
    caps.attention = j.at("attention").get<bool>();
    caps.batch_limit = j.at("batch_limit").get<std::size_t>();
    if (caps.batch_limit < 1) throw OracleError("batch_limit must be >= 1");
    return caps;
  } catch (const json::exception& e) {
    throw OracleError(std::string("malformed capabilities: ") + e.what());
  }
}

json ExternalOracle::RoundTrip(json request) const {
  const std::uint64_t id = next_id_++;
  request["id"] = id;
  channel_->WriteLine(request.dump());
  const auto line = channel_->ReadLine();
  if (!line) {
    throw OracleError(description_ + ": connection closed awaiting reply " +
                      std::to_string(id));
  }
  json reply;
  try {
    reply = json::parse(*line);
  } catch (const json::parse_error&) {
    throw OracleError(description_ + ": malformed reply: " + *line);
  }
  if (!reply.is_object() || !reply.contains("id") ||
      !reply["id"].is_number_unsigned() ||
      reply["id"].get<std::uint64_t>() != id) {
    if (reply.is_object() && reply.value("op", "") == "error") {
      throw OracleError(description_ + ": " + reply.value("message", "error"));
    }
    throw OracleError(description_ + ": reply id does not match request " +
                      std::to_string(id));
  }
  if (reply.value("op", "") == "error") {
    throw OracleError(description_ + ": " + reply.value("message", "error"));
  }
  return reply;
}

void ExternalOracle::EnsureLoaded(const VideoBundle& bundle) const {
  if (loaded_.count(bundle.video_id)) return;
  if (bundle.paths.features.empty()) {
    throw OracleError(description_ + ": video " + bundle.video_id +
                      " has no file paths to send");
  }
  const json reply =
      RoundTrip(json{{"op", "load"},
                     {"video_id", bundle.video_id},
                     {"features_path", bundle.paths.features},
                     {"frames_path", NullableString(bundle.paths.frames)},
                     {"segmentation_path",
                      NullableString(bundle.paths.segmentation)}});
  if (reply.value("op", "") != "ok") {
    throw OracleError(description_ + ": unexpected reply to load");
  }
  loaded_.insert(bundle.video_id);
}

std::vector<double> ExternalOracle::NumberArray(const json& response,
                                                const char* field) const {
  if (!response.contains(field) || !response[field].is_array()) {
    throw OracleError(description_ + ": reply lacks \"" + field + "\"");
  }
  std::vector<double> out;
  out.reserve(response[field].size());
  for (const json& v : response[field]) {
    if (!v.is_number()) {
      throw OracleError(description_ + ": non-numeric entry in " + field);
    }
    out.push_back(v.get<double>());
  }
  return out;
}

ScoreSequence ExternalOracle::DoScore(const VideoBundle& bundle,
                                      const PerturbationSpec& spec) const {
  std::lock_guard<std::mutex> lock(mu_);
  EnsureLoaded(bundle);
  json request{{"op", "score"},
               {"video_id", bundle.video_id},
               {"spec", SpecToJson(spec)}};
  const bool first = !fragments_sent_.count(bundle.video_id);
  if (first) {
    json frags = json::array();
    for (const Fragment& f : bundle.fragmentation.fragments()) {
      frags.push_back({f.start, f.end});
    }
    request["fragments"] = frags;
  }
  const json reply = RoundTrip(std::move(request));
  if (first) fragments_sent_.insert(bundle.video_id);
  if (reply.value("op", "") != "scores") {
    throw OracleError(description_ + ": unexpected reply to score");
  }
  return NumberArray(reply, "scores");
}

AttentionDiagonal ExternalOracle::DoAttention(const VideoBundle& bundle) const {
  std::lock_guard<std::mutex> lock(mu_);
  EnsureLoaded(bundle);
  const json reply =
      RoundTrip(json{{"op", "attention"}, {"video_id", bundle.video_id}});
  if (reply.value("op", "") != "attention") {
    throw OracleError(description_ + ": unexpected reply to attention");
  }
  return NumberArray(reply, "diag");
}

}  // namespace xsumx
