// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ULFSYNTH_UTIL_TIME_H_
#define ULFSYNTH_UTIL_TIME_H_

#include <cstdint>
#include <optional>
#include <string>

namespace ulfsynth {

// UTC timestamps as seconds since the Unix epoch, serialized as
// "YYYY-MM-DDTHH:MM:SSZ".
std::string FormatIsoUtc(int64_t epoch_seconds);
std::optional<int64_t> ParseIsoUtc(const std::string& text);
int64_t NowEpochSeconds();

}  // namespace ulfsynth

#endif  // ULFSYNTH_UTIL_TIME_H_
