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

#include "ulfsynth/volgrid/nifti.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "ulfsynth/util/errors.h"

namespace ulfsynth::nifti {
namespace {

constexpr int kHeaderSize = 348;
constexpr int kSingleFileOffset = 352;

// Field offsets in the 348-byte NIfTI-1 header.
constexpr int kOffDim = 40;
constexpr int kOffDatatype = 70;
constexpr int kOffBitpix = 72;
constexpr int kOffPixdim = 76;
constexpr int kOffVoxOffset = 108;
constexpr int kOffSclSlope = 112;
constexpr int kOffSclInter = 116;
constexpr int kOffXyztUnits = 123;
constexpr int kOffCalMax = 124;
constexpr int kOffCalMin = 128;
constexpr int kOffDescrip = 148;
constexpr int kOffQformCode = 252;
constexpr int kOffSformCode = 254;
constexpr int kOffQuatern = 256;
constexpr int kOffQoffset = 268;
constexpr int kOffSrow = 280;
constexpr int kOffMagic = 344;

struct GzCloser {
  void operator()(gzFile_s* f) const {
    if (f != nullptr) gzclose(f);
  }
};
using GzFile = std::unique_ptr<gzFile_s, GzCloser>;

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Reads up to `limit` bytes (all when negative) through zlib, which passes
// uncompressed files through unchanged.
std::vector<unsigned char> ReadBytes(const std::string& path, int64_t limit) {
  GzFile file(gzopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes;
  constexpr unsigned kChunk = 1 << 20;
  while (limit < 0 || static_cast<int64_t>(bytes.size()) < limit) {
    const size_t old = bytes.size();
    unsigned want = kChunk;
    if (limit >= 0) {
      want = static_cast<unsigned>(
          std::min<int64_t>(kChunk, limit - static_cast<int64_t>(old)));
    }
    bytes.resize(old + want);
    const int got = gzread(file.get(), bytes.data() + old, want);
    if (got < 0) {
      int errnum = 0;
      throw IoError("read error in " + path + ": " +
                    gzerror(file.get(), &errnum));
    }
    bytes.resize(old + static_cast<size_t>(got));
    if (got == 0) break;
  }
  return bytes;
}

class HeaderView {
 public:
  HeaderView(const unsigned char* data, bool swap) : data_(data), swap_(swap) {}

  template <typename T>
  T Get(int offset) const {
    T value;
    std::memcpy(&value, data_ + offset, sizeof(T));
    if (swap_) {
      auto* p = reinterpret_cast<unsigned char*>(&value);
      std::reverse(p, p + sizeof(T));
    }
    return value;
  }
  std::string Chars(int offset, int n) const {
    std::string s(reinterpret_cast<const char*>(data_ + offset), n);
    return s.substr(0, s.find('\0'));
  }

 private:
  const unsigned char* data_;
  bool swap_;
};

Eigen::Matrix4d QuaternionToAffine(const HeaderView& h,
                                   const std::array<double, 4>& pixdim) {
  double b = h.Get<float>(kOffQuatern);
  double c = h.Get<float>(kOffQuatern + 4);
  double d = h.Get<float>(kOffQuatern + 8);
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    // Rounding pushed the quaternion off the unit sphere; renormalize.
    const double norm = std::sqrt(b * b + c * c + d * d);
    b /= norm;
    c /= norm;
    d /= norm;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  const double qfac = pixdim[0] < 0.0 ? -1.0 : 1.0;
  Eigen::Matrix3d r;
  r << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),
      2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b),
      2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.col(0).head<3>() = r.col(0) * pixdim[1];
  m.col(1).head<3>() = r.col(1) * pixdim[2];
  m.col(2).head<3>() = r.col(2) * pixdim[3] * qfac;
  for (int i = 0; i < 3; ++i) m(i, 3) = h.Get<float>(kOffQoffset + 4 * i);
  return m;
}

struct Quatern {
  double b = 0, c = 0, d = 0, qfac = 1;
};

// Inverse of QuaternionToAffine for an orthogonal direction matrix.
Quatern AffineToQuaternion(const Eigen::Matrix4d& affine) {
  Eigen::Matrix3d r = affine.topLeftCorner<3, 3>();
  for (int a = 0; a < 3; ++a) r.col(a).normalize();
  Quatern q;
  if (r.determinant() < 0) {
    q.qfac = -1.0;
    r.col(2) = -r.col(2);
  }
  double a = r(0, 0) + r(1, 1) + r(2, 2) + 1.0;
  double b, c, d;
  if (a > 0.5) {
    a = 0.5 * std::sqrt(a);
    b = 0.25 * (r(2, 1) - r(1, 2)) / a;
    c = 0.25 * (r(0, 2) - r(2, 0)) / a;
    d = 0.25 * (r(1, 0) - r(0, 1)) / a;
  } else {
    const double xd = 1.0 + r(0, 0) - (r(1, 1) + r(2, 2));
    const double yd = 1.0 + r(1, 1) - (r(0, 0) + r(2, 2));
    const double zd = 1.0 + r(2, 2) - (r(0, 0) + r(1, 1));
    if (xd > 1.0) {
      b = 0.5 * std::sqrt(xd);
      c = 0.25 * (r(0, 1) + r(1, 0)) / b;
      d = 0.25 * (r(0, 2) + r(2, 0)) / b;
      a = 0.25 * (r(2, 1) - r(1, 2)) / b;
    } else if (yd > 1.0) {
      c = 0.5 * std::sqrt(yd);
      b = 0.25 * (r(0, 1) + r(1, 0)) / c;
      d = 0.25 * (r(1, 2) + r(2, 1)) / c;
      a = 0.25 * (r(0, 2) - r(2, 0)) / c;
    } else {
      d = 0.5 * std::sqrt(zd);
      b = 0.25 * (r(0, 2) + r(2, 0)) / d;
      c = 0.25 * (r(1, 2) + r(2, 1)) / d;
      a = 0.25 * (r(1, 0) - r(0, 1)) / d;
    }
    if (a < 0.0) {
      b = -b;
      c = -c;
      d = -d;
    }
  }
  q.b = b;
  q.c = c;
  q.d = d;
  return q;
}

bool IsOrthogonal(const Eigen::Matrix4d& affine) {
  Eigen::Matrix3d r = affine.topLeftCorner<3, 3>();
  for (int a = 0; a < 3; ++a) r.col(a).normalize();
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
         1e-4;
}

int BytesPerVoxel(int16_t datatype) {
  switch (datatype) {
    case kUint8:
    case kInt8:
      return 1;
    case kInt16:
    case kUint16:
      return 2;
    case kInt32:
    case kUint32:
    case kFloat32:
      return 4;
    case kFloat64:
    case kInt64:
    case kUint64:
      return 8;
    default:
      return 0;
  }
}

bool IsIntegerType(int16_t datatype) {
  return datatype != kFloat32 && datatype != kFloat64;
}

template <typename T>
double Load(const unsigned char* p, bool swap) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if (swap) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return static_cast<double>(value);
}

double LoadVoxel(const unsigned char* p, int16_t datatype, bool swap) {
  switch (datatype) {
    case kUint8: return Load<uint8_t>(p, swap);
    case kInt8: return Load<int8_t>(p, swap);
    case kInt16: return Load<int16_t>(p, swap);
    case kUint16: return Load<uint16_t>(p, swap);
    case kInt32: return Load<int32_t>(p, swap);
    case kUint32: return Load<uint32_t>(p, swap);
    case kInt64: return Load<int64_t>(p, swap);
    case kUint64: return Load<uint64_t>(p, swap);
    case kFloat32: return Load<float>(p, swap);
    case kFloat64: return Load<double>(p, swap);
  }
  return 0.0;
}

struct ParsedHeader {
  HeaderInfo info;
  int64_t vox_offset;
  std::string data_path;
};

ParsedHeader ParseHeader(const std::vector<unsigned char>& bytes,
                         const std::string& path) {
  if (bytes.size() < static_cast<size_t>(kHeaderSize)) {
    throw FormatError(path + ": truncated header (" +
                      std::to_string(bytes.size()) + " bytes)");
  }
  int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, bytes.data(), 4);
  bool swap = false;
  if (sizeof_hdr != kHeaderSize) {
    if (static_cast<int32_t>(__builtin_bswap32(static_cast<uint32_t>(sizeof_hdr))) != kHeaderSize) {
      throw FormatError(path + ": bad sizeof_hdr " +
                        std::to_string(sizeof_hdr));
    }
    swap = true;
  }
  const HeaderView h(bytes.data(), swap);
  const std::string magic = h.Chars(kOffMagic, 4);
  if (magic != "n+1" && magic != "ni1") {
    throw FormatError(path + ": bad magic \"" + magic +
                      "\" (expected n+1 or ni1)");
  }

  std::array<int16_t, 8> dim;
  for (int i = 0; i < 8; ++i) dim[i] = h.Get<int16_t>(kOffDim + 2 * i);
  if (dim[0] < 1 || dim[0] > 7) {
    throw FormatError(path + ": bad dim[0] " + std::to_string(dim[0]));
  }
  Index3 dims{1, 1, 1};
  for (int i = 1; i <= dim[0]; ++i) {
    if (dim[i] < 1) {
      throw FormatError(path + ": bad dim[" + std::to_string(i) + "] " +
                        std::to_string(dim[i]));
    }
    if (i <= 3) {
      dims[i - 1] = dim[i];
    } else if (dim[i] != 1) {
      throw DimensionalityError(path + ": " + std::to_string(dim[0]) +
                                "-D image with dim[" + std::to_string(i) +
                                "] = " + std::to_string(dim[i]) +
                                "; only 3-D volumes are supported");
    }
  }

  const int16_t datatype = h.Get<int16_t>(kOffDatatype);
  const int bytes_per_voxel = BytesPerVoxel(datatype);
  if (bytes_per_voxel == 0) {
    throw UnsupportedTypeError(path + ": unsupported datatype " +
                               std::to_string(datatype));
  }
  const int16_t bitpix = h.Get<int16_t>(kOffBitpix);
  if (bitpix != 8 * bytes_per_voxel) {
    throw FormatError(path + ": bitpix " + std::to_string(bitpix) +
                      " inconsistent with datatype " +
                      std::to_string(datatype));
  }

  std::array<double, 4> pixdim;
  for (int i = 0; i < 4; ++i) pixdim[i] = h.Get<float>(kOffPixdim + 4 * i);

  const int16_t sform_code = h.Get<int16_t>(kOffSformCode);
  const int16_t qform_code = h.Get<int16_t>(kOffQformCode);
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  std::string source;
  auto nonsingular = [](const Eigen::Matrix4d& m) {
    return m.allFinite() &&
           std::abs(m.topLeftCorner<3, 3>().determinant()) > 1e-12;
  };
  if (sform_code > 0) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        affine(r, c) = h.Get<float>(kOffSrow + 16 * r + 4 * c);
      }
    }
    if (nonsingular(affine)) source = "sform";
  }
  if (source.empty() && qform_code > 0) {
    bool spacing_ok = true;
    for (int i = 1; i <= 3; ++i) spacing_ok &= pixdim[i] > 0.0;
    if (spacing_ok) {
      affine = QuaternionToAffine(h, pixdim);
      if (nonsingular(affine)) source = "qform";
    }
  }
  if (source.empty()) {
    affine = Eigen::Matrix4d::Identity();
    for (int i = 1; i <= 3; ++i) {
      if (!(pixdim[i] > 0.0)) {
        throw FormatError(path + ": bad pixdim[" + std::to_string(i) + "] " +
                          std::to_string(pixdim[i]));
      }
      affine(i - 1, i - 1) = pixdim[i];
    }
    source = "pixdim";
  }

  double slope = h.Get<float>(kOffSclSlope);
  double inter = h.Get<float>(kOffSclInter);
  if (!std::isfinite(slope) || slope == 0.0) slope = 1.0;
  if (!std::isfinite(inter)) inter = 0.0;

  ParsedHeader parsed{
      HeaderInfo{Grid::FromAffine(dims, affine), datatype, bitpix, slope, inter, swap,
                 source},
      static_cast<int64_t>(h.Get<float>(kOffVoxOffset)), path};
  if (magic == "n+1") {
    if (parsed.vox_offset < kSingleFileOffset) {
      throw FormatError(path + ": bad vox_offset " +
                        std::to_string(parsed.vox_offset));
    }
  } else {
    if (parsed.vox_offset < 0) {
      throw FormatError(path + ": bad vox_offset " +
                        std::to_string(parsed.vox_offset));
    }
    std::string stem = path;
    bool gz = EndsWith(stem, ".gz");
    if (gz) stem.resize(stem.size() - 3);
    if (!EndsWith(stem, ".hdr")) {
      throw FormatError(path + ": magic ni1 requires a .hdr/.img pair");
    }
    stem.resize(stem.size() - 4);
    parsed.data_path = stem + (gz ? ".img.gz" : ".img");
  }
  return parsed;
}

std::vector<double> ReadScaledData(const ParsedHeader& parsed) {
  const HeaderInfo& info = parsed.info;
  const int64_t n = info.grid.num_voxels();
  const int bpv = BytesPerVoxel(info.datatype);
  const int64_t needed = parsed.vox_offset + n * bpv;
  std::vector<unsigned char> bytes = ReadBytes(parsed.data_path, needed);
  if (static_cast<int64_t>(bytes.size()) < needed) {
    throw FormatError(parsed.data_path + ": truncated voxel data (expected " +
                      std::to_string(needed) + " bytes, got " +
                      std::to_string(bytes.size()) + ")");
  }
  std::vector<double> values(n);
  const unsigned char* p = bytes.data() + parsed.vox_offset;
  for (int64_t i = 0; i < n; ++i) {
    const double raw = LoadVoxel(p + i * bpv, info.datatype, info.big_endian);
    const double v = info.scl_slope * raw + info.scl_inter;
    values[i] = std::isfinite(v) ? v : 0.0;
  }
  return values;
}

bool HasIdentityScaling(const HeaderInfo& info) {
  return info.scl_slope == 1.0 && info.scl_inter == 0.0;
}

LabelMap ToLabels(const HeaderInfo& info, const std::vector<double>& values,
                  const std::string& path) {
  std::vector<Label> data(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v < 0.0 || v != std::floor(v) ||
        v > static_cast<double>(std::numeric_limits<Label>::max())) {
      throw FormatError(path + ": voxel " + std::to_string(i) + " value " +
                        std::to_string(v) + " is not a valid label");
    }
    data[i] = static_cast<Label>(v);
  }
  return LabelMap::WithDerivedVocabulary(info.grid, std::move(data));
}

Volume ToVolume(const HeaderInfo& info, const std::vector<double>& values) {
  std::vector<float> data(values.begin(), values.end());
  for (float& v : data) {
    if (!std::isfinite(v)) v = 0.0f;
  }
  return Volume(info.grid, std::move(data));
}

template <typename T>
void Put(std::vector<unsigned char>& buf, int offset, T value) {
  static_assert(std::endian::native == std::endian::little,
                "writer assumes a little-endian host");
  std::memcpy(buf.data() + offset, &value, sizeof(T));
}

std::vector<unsigned char> MakeHeader(const Grid& grid, int16_t datatype,
                                      int16_t bitpix, double cal_min,
                                      double cal_max) {
  std::vector<unsigned char> buf(kSingleFileOffset, 0);
  Put<int32_t>(buf, 0, kHeaderSize);
  buf[38] = 'r';  // regular
  Put<int16_t>(buf, kOffDim, 3);
  for (int a = 0; a < 3; ++a) {
    Put<int16_t>(buf, kOffDim + 2 * (a + 1),
                 static_cast<int16_t>(grid.dims()[a]));
  }
  for (int i = 4; i < 8; ++i) Put<int16_t>(buf, kOffDim + 2 * i, 1);
  Put<int16_t>(buf, kOffDatatype, datatype);
  Put<int16_t>(buf, kOffBitpix, bitpix);

  const Eigen::Matrix4d& affine = grid.affine();
  const bool orthogonal = IsOrthogonal(affine);
  const Quatern q = AffineToQuaternion(affine);
  Put<float>(buf, kOffPixdim, static_cast<float>(q.qfac));
  for (int a = 0; a < 3; ++a) {
    Put<float>(buf, kOffPixdim + 4 * (a + 1),
               static_cast<float>(grid.spacing()[a]));
  }
  for (int i = 4; i < 8; ++i) Put<float>(buf, kOffPixdim + 4 * i, 1.0f);
  Put<float>(buf, kOffVoxOffset, static_cast<float>(kSingleFileOffset));
  Put<float>(buf, kOffSclSlope, 1.0f);
  Put<float>(buf, kOffSclInter, 0.0f);
  buf[kOffXyztUnits] = 2 | 8;  // mm, s
  Put<float>(buf, kOffCalMax, static_cast<float>(cal_max));
  Put<float>(buf, kOffCalMin, static_cast<float>(cal_min));
  const char descrip[] = "ulfsynth";
  std::memcpy(buf.data() + kOffDescrip, descrip, sizeof(descrip));

  Put<int16_t>(buf, kOffQformCode, orthogonal ? 1 : 0);
  Put<int16_t>(buf, kOffSformCode, 1);
  if (orthogonal) {
    Put<float>(buf, kOffQuatern, static_cast<float>(q.b));
    Put<float>(buf, kOffQuatern + 4, static_cast<float>(q.c));
    Put<float>(buf, kOffQuatern + 8, static_cast<float>(q.d));
  }
  for (int i = 0; i < 3; ++i) {
    Put<float>(buf, kOffQoffset + 4 * i, static_cast<float>(affine(i, 3)));
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      Put<float>(buf, kOffSrow + 16 * r + 4 * c,
                 static_cast<float>(affine(r, c)));
    }
  }
  std::memcpy(buf.data() + kOffMagic, "n+1\0", 4);
  return buf;
}

void WriteFile(const std::string& path, std::vector<unsigned char> header,
               const void* data, size_t data_bytes) {
  const bool gz = EndsWith(path, ".gz");
  GzFile file(gzopen(path.c_str(), gz ? "wb6" : "wbT"));
  if (!file) throw IoError("cannot open " + path + " for writing");
  auto write = [&](const void* p, size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    while (n > 0) {
      const unsigned chunk = static_cast<unsigned>(std::min<size_t>(n, 1 << 30));
      if (gzwrite(file.get(), bytes, chunk) != static_cast<int>(chunk)) {
        throw IoError("write error in " + path);
      }
      bytes += chunk;
      n -= chunk;
    }
  };
  write(header.data(), header.size());
  write(data, data_bytes);
  if (gzclose(file.release()) != Z_OK) {
    throw IoError("error closing " + path);
  }
}

}  // namespace

HeaderInfo ReadHeader(const std::string& path) {
  return ParseHeader(ReadBytes(path, kHeaderSize), path).info;
}

std::variant<Volume, LabelMap> Read(const std::string& path,
                                    Interpretation interpretation) {
  const ParsedHeader parsed = ParseHeader(ReadBytes(path, kHeaderSize), path);
  const std::vector<double> values = ReadScaledData(parsed);
  if (interpretation == Interpretation::kAuto) {
    interpretation = IsIntegerType(parsed.info.datatype) &&
                             HasIdentityScaling(parsed.info)
                         ? Interpretation::kLabels
                         : Interpretation::kVolume;
  }
  if (interpretation == Interpretation::kLabels) {
    return ToLabels(parsed.info, values, path);
  }
  return ToVolume(parsed.info, values);
}

Volume ReadVolume(const std::string& path) {
  return std::get<Volume>(Read(path, Interpretation::kVolume));
}

LabelMap ReadLabelMap(const std::string& path) {
  return std::get<LabelMap>(Read(path, Interpretation::kLabels));
}

void Write(const Volume& volume, const std::string& path) {
  const auto data = volume.data();
  auto header = MakeHeader(volume.grid(), kFloat32, 32, volume.Min(),
                           volume.Max());
  WriteFile(path, std::move(header), data.data(), data.size_bytes());
}

void Write(const LabelMap& labels, const std::string& path) {
  const auto data = labels.data();
  const Label max_label =
      data.empty() ? 0 : *std::max_element(data.begin(), data.end());
  if (max_label <= 255) {
    std::vector<uint8_t> narrow(data.begin(), data.end());
    WriteFile(path, MakeHeader(labels.grid(), kUint8, 8, 0, max_label),
              narrow.data(), narrow.size());
  } else if (max_label <= 32767) {
    std::vector<int16_t> narrow(data.begin(), data.end());
    WriteFile(path, MakeHeader(labels.grid(), kInt16, 16, 0, max_label),
              narrow.data(), narrow.size() * sizeof(int16_t));
  } else {
    WriteFile(path, MakeHeader(labels.grid(), kInt32, 32, 0, max_label),
              data.data(), data.size_bytes());
  }
}

}  // namespace ulfsynth::nifti
