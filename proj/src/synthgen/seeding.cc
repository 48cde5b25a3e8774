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

#include "ulfsynth/synthgen/seeding.h"

namespace ulfsynth {

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

uint64_t FnvBytes(uint64_t h, const unsigned char* p, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

uint64_t FnvU64(uint64_t h, uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  return FnvBytes(h, bytes, 8);
}

uint64_t FnvString(uint64_t h, std::string_view s) {
  // Length prefix keeps ("ab", "c") and ("a", "bc") apart.
  h = FnvU64(h, s.size());
  return FnvBytes(h, reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

}  // namespace

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t SampleSeed(uint64_t dataset_seed, std::string_view subject_id,
                    uint64_t epoch, uint64_t index) {
  uint64_t h = FnvU64(kFnvOffset, dataset_seed);
  h = FnvString(h, subject_id);
  h = FnvU64(h, epoch);
  h = FnvU64(h, index);
  return SplitMix64(h);
}

uint64_t StageSeed(uint64_t sample_seed, std::string_view stage) {
  return SplitMix64(FnvString(FnvU64(kFnvOffset, sample_seed), stage));
}

}  // namespace ulfsynth
