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

#ifndef ULFSYNTH_VOLGRID_NIFTI_H_
#define ULFSYNTH_VOLGRID_NIFTI_H_

#include <cstdint>
#include <string>
#include <variant>

#include "ulfsynth/volgrid/grid.h"
#include "ulfsynth/volgrid/image.h"

namespace ulfsynth::nifti {

// NIfTI-1 datatype codes this toolkit reads.
enum DataType : int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
  kInt8 = 256,
  kUint16 = 512,
  kUint32 = 768,
  kInt64 = 1024,
  kUint64 = 1280,
};

enum class Interpretation {
  kAuto,    // integer datatype without scaling -> labels, otherwise volume
  kVolume,
  kLabels,
};

struct HeaderInfo {
  Grid grid;
  int16_t datatype;
  int16_t bitpix;
  double scl_slope;
  double scl_inter;
  bool big_endian;
  // Which transform produced the grid: "sform", "qform" or "pixdim".
  std::string affine_source;
};

// Parses only the header. Accepts .nii, .nii.gz and .hdr/.img pairs,
// little- or big-endian.
HeaderInfo ReadHeader(const std::string& path);

// Reads scaled voxel data. Throws FormatError (naming the header field),
// UnsupportedTypeError, DimensionalityError or IoError.
std::variant<Volume, LabelMap> Read(const std::string& path,
                                    Interpretation interpretation =
                                        Interpretation::kAuto);
Volume ReadVolume(const std::string& path);
// Label data must be non-negative integers after scaling. The vocabulary is
// derived from the labels present.
LabelMap ReadLabelMap(const std::string& path);

// Writes little-endian NIfTI-1 (single file). A ".gz" suffix selects gzip
// compression. Volumes are stored as float32; label maps use the narrowest
// of uint8/int16/int32 that holds their largest id. Throws IoError.
void Write(const Volume& volume, const std::string& path);
void Write(const LabelMap& labels, const std::string& path);

}  // namespace ulfsynth::nifti

#endif  // ULFSYNTH_VOLGRID_NIFTI_H_
