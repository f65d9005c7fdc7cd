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

#ifndef XSUMX_BUNDLE_H_
#define XSUMX_BUNDLE_H_

#include <filesystem>
#include <string>

#include "xsumx/fragmentation.h"
#include "xsumx/types.h"

namespace xsumx {

// Loads one video directory of a corpus. Without a fragments file the
// fragmentation is derived from the features (shot detection followed by
// the minimum-fragment fallback).
VideoBundle LoadBundle(const std::filesystem::path& video_dir,
                       const FragmenterConfig& fragmenter = {});

// Cross-component consistency checks. Empty iff every invariant holds.
Findings ValidateBundle(const VideoBundle& bundle);

}  // namespace xsumx

#endif  // XSUMX_BUNDLE_H_
