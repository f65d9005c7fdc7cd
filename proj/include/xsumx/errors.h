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

#ifndef XSUMX_ERRORS_H_
#define XSUMX_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xsumx {

// Malformed file contents. Carries the byte offset where decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " +
                           std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Input that decodes fine but breaks a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Oracle failures: unsupported capability, transport errors, remote errors.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The surrogate regression cannot be fitted (rank-deficient design).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostic. `component` names the part of the input or pipeline
// the finding is about, `message` the violated constraint.
struct Finding {
  std::string component;
  std::string message;

  bool operator==(const Finding&) const = default;
};

using Findings = std::vector<Finding>;

inline void AddFinding(Findings* findings, std::string component,
                       std::string message) {
  if (findings != nullptr) {
    findings->push_back({std::move(component), std::move(message)});
  }
}

}  // namespace xsumx

#endif  // XSUMX_ERRORS_H_
