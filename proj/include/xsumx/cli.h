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

#ifndef XSUMX_CLI_H_
#define XSUMX_CLI_H_

#include <memory>
#include <string>

#include "xsumx/oracle.h"

namespace xsumx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitOracle = 3;

// Builds an oracle from a selector:
//   toy-attention | toy-norm | linear:<base>:<w0,w1,...>[:<slope>]
//   pixel[:mean|norm|attention] | exec:<command> | tcp:<host:port>
// Throws ValidationError for a malformed selector, OracleError when an
// external oracle cannot be reached.
std::shared_ptr<const Oracle> MakeOracle(const std::string& selector);

// Entry point of the xsumx tool. Returns the process exit code.
int RunCli(int argc, char** argv);

}  // namespace xsumx

#endif  // XSUMX_CLI_H_
