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

#ifndef XSUMX_PARALLEL_H_
#define XSUMX_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace xsumx {

// Calls fn(i) for every i in [0, n) on up to `workers` threads (0 or 1 runs
// inline). Results must go to pre-indexed storage. If any call throws, the
// exception of the lowest failing index is rethrown after all threads join.
void ParallelFor(std::size_t n, std::size_t workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace xsumx

#endif  // XSUMX_PARALLEL_H_
