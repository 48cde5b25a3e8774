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

#ifndef ULFSYNTH_QCSERVE_PNG_H_
#define ULFSYNTH_QCSERVE_PNG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace ulfsynth::png {

// 8-bit grayscale PNG, rows top to bottom. No time or text chunks, so equal
// pixels give equal bytes. Throws ContractError on a size mismatch.
std::string EncodeGray8(int width, int height, const std::vector<uint8_t>& pixels);

struct Gray8Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;
};

// Decodes an 8-bit grayscale PNG; throws FormatError for anything else.
Gray8Image DecodeGray8(const std::string& bytes);

}  // namespace ulfsynth::png

#endif  // ULFSYNTH_QCSERVE_PNG_H_
