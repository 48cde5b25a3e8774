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

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <set>

#include <Eigen/Geometry>

#include "gtest/gtest.h"
#include "test_support.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/volgrid/filter.h"
#include "ulfsynth/volgrid/grid.h"
#include "ulfsynth/volgrid/image.h"
#include "ulfsynth/volgrid/nifti.h"
#include "ulfsynth/volgrid/resample.h"

namespace ulfsynth {
namespace {

using testing::TempDir;

// Minimal NIfTI-1 writer written from the format definition, independent of
// the library writer, so reader tests do not only check self-consistency.
struct RawHeader {
  std::array<int16_t, 8> dim{3, 4, 3, 2, 1, 1, 1, 1};
  int16_t datatype = 2;
  int16_t bitpix = 8;
  std::array<float, 8> pixdim{1, 1, 1, 1, 1, 1, 1, 1};
  float vox_offset = 352;
  float scl_slope = 1;
  float scl_inter = 0;
  int16_t qform_code = 0;
  int16_t sform_code = 0;
  std::array<float, 3> quatern{0, 0, 0};
  std::array<float, 3> qoffset{0, 0, 0};
  std::array<std::array<float, 4>, 3> srow{};
  char magic[4] = {'n', '+', '1', '\0'};
  int32_t sizeof_hdr = 348;
};

template <typename T>
void PutRaw(std::vector<char>& buf, int off, T v, bool big_endian) {
  std::memcpy(buf.data() + off, &v, sizeof(T));
  if (big_endian) std::reverse(buf.begin() + off, buf.begin() + off + sizeof(T));
}

std::vector<char> EncodeHeader(const RawHeader& h, bool big_endian) {
  std::vector<char> buf(352, 0);
  PutRaw<int32_t>(buf, 0, h.sizeof_hdr, big_endian);
  for (int i = 0; i < 8; ++i) PutRaw<int16_t>(buf, 40 + 2 * i, h.dim[i], big_endian);
  PutRaw<int16_t>(buf, 70, h.datatype, big_endian);
  PutRaw<int16_t>(buf, 72, h.bitpix, big_endian);
  for (int i = 0; i < 8; ++i) PutRaw<float>(buf, 76 + 4 * i, h.pixdim[i], big_endian);
  PutRaw<float>(buf, 108, h.vox_offset, big_endian);
  PutRaw<float>(buf, 112, h.scl_slope, big_endian);
  PutRaw<float>(buf, 116, h.scl_inter, big_endian);
  PutRaw<int16_t>(buf, 252, h.qform_code, big_endian);
  PutRaw<int16_t>(buf, 254, h.sform_code, big_endian);
  for (int i = 0; i < 3; ++i) PutRaw<float>(buf, 256 + 4 * i, h.quatern[i], big_endian);
  for (int i = 0; i < 3; ++i) PutRaw<float>(buf, 268 + 4 * i, h.qoffset[i], big_endian);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      PutRaw<float>(buf, 280 + 16 * r + 4 * c, h.srow[r][c], big_endian);
  std::memcpy(buf.data() + 344, h.magic, 4);
  return buf;
}

template <typename T>
void WriteRaw(const std::string& path, const RawHeader& h,
              const std::vector<T>& data, bool big_endian = false) {
  std::vector<char> buf = EncodeHeader(h, big_endian);
  for (T v : data) {
    const size_t off = buf.size();
    buf.resize(off + sizeof(T));
    PutRaw<T>(buf, static_cast<int>(off), v, big_endian);
  }
  std::ofstream(path, std::ios::binary).write(buf.data(), buf.size());
}

Volume RampVolume(const Grid& grid, double a, double b, double c, double d) {
  std::vector<float> data(grid.num_voxels());
  for (int64_t off = 0; off < grid.num_voxels(); ++off) {
    const Index3 idx = grid.IndexOf(off);
    data[off] = static_cast<float>(a * idx[0] + b * idx[1] + c * idx[2] + d);
  }
  return Volume(grid, std::move(data));
}

// ---------------------------------------------------------------- Grid

TEST(Grid, SpacingFromAffineColumnNorms) {
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  affine.topLeftCorner<3, 3>() = rot * Eigen::Vector3d(0.5, 2.0, 3.0).asDiagonal();
  const Grid grid = Grid::FromAffine({4, 5, 6}, affine);
  EXPECT_NEAR(grid.spacing()[0], 0.5, 1e-12);
  EXPECT_NEAR(grid.spacing()[1], 2.0, 1e-12);
  EXPECT_NEAR(grid.spacing()[2], 3.0, 1e-12);
  EXPECT_EQ(grid.num_voxels(), 120);
}

TEST(Grid, RejectsInvalidGeometry) {
  EXPECT_THROW(Grid({0, 4, 4}, {1, 1, 1}), ContractError);
  EXPECT_THROW(Grid({4, 4, 4}, {1, 0, 1}), ContractError);
  Eigen::Matrix4d singular = Eigen::Matrix4d::Identity();
  singular(2, 2) = 0.0;
  EXPECT_THROW(Grid::FromAffine({4, 4, 4}, singular), ContractError);
}

TEST(Grid, OffsetAndIndexAreInverse) {
  const Grid grid({3, 4, 5}, {1, 1, 1});
  for (int64_t off = 0; off < grid.num_voxels(); ++off) {
    const Index3 idx = grid.IndexOf(off);
    EXPECT_EQ(grid.Offset(idx[0], idx[1], idx[2]), off);
  }
  EXPECT_EQ(grid.Offset(1, 0, 0), 1);  // axis 0 is fastest
}

TEST(Image, LabelMapRejectsUnknownLabels) {
  const Grid grid({2, 1, 1}, {1, 1, 1});
  EXPECT_THROW(LabelMap(grid, {0, 3}, testing::NumberedVocabulary(2)),
               ContractError);
  EXPECT_THROW(LabelMap(grid, {0, -1}, {}), ContractError);
  EXPECT_THROW(Volume(grid, {0.0f, NAN}), ContractError);
  EXPECT_THROW(Volume(grid, {0.0f}), ContractError);
}

// ---------------------------------------------------------------- NIfTI

TEST(Nifti, FloatVolumeRoundTrip) {
  TempDir tmp;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-100.f, 100.f);
  const Grid grid({64, 64, 64}, {1, 1, 1});
  std::vector<float> data(grid.num_voxels());
  for (float& v : data) v = u(rng);
  const Volume vol(grid, data);
  for (const std::string name : {"v.nii", "v.nii.gz"}) {
    nifti::Write(vol, tmp.File(name));
    const Volume back = nifti::ReadVolume(tmp.File(name));
    EXPECT_EQ(back.grid().dims(), (Index3{64, 64, 64}));
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(back.grid().spacing()[a], 1.0, 1e-5);
    for (int64_t i = 0; i < vol.size(); ++i) ASSERT_EQ(back[i], vol[i]);
  }
}

TEST(Nifti, Uint8LabelsReadAsLabelMap) {
  TempDir tmp;
  RawHeader h;
  WriteRaw<uint8_t>(tmp.File("l.nii"), h, {0, 1, 2, 0, 1, 2, 0, 0, 0, 0, 0, 1,
                                          0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0});
  auto img = nifti::Read(tmp.File("l.nii"));
  ASSERT_TRUE(std::holds_alternative<LabelMap>(img));
  const LabelMap& labels = std::get<LabelMap>(img);
  EXPECT_TRUE(labels.vocabulary().contains(1));
  EXPECT_TRUE(labels.vocabulary().contains(2));
  EXPECT_EQ(labels.at(1, 0, 0), 1);
  EXPECT_EQ(labels.at(2, 0, 0), 2);
}

TEST(Nifti, BadMagicIsFormatError) {
  TempDir tmp;
  RawHeader h;
  std::memcpy(h.magic, "xyz", 4);
  WriteRaw<uint8_t>(tmp.File("bad.nii"), h, std::vector<uint8_t>(24, 0));
  try {
    nifti::Read(tmp.File("bad.nii"));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }
}

TEST(Nifti, HeaderErrorsNameTheField) {
  TempDir tmp;
  RawHeader h;
  h.sizeof_hdr = 100;
  WriteRaw<uint8_t>(tmp.File("a.nii"), h, std::vector<uint8_t>(24, 0));
  EXPECT_THROW(nifti::Read(tmp.File("a.nii")), FormatError);

  RawHeader bitpix;
  bitpix.bitpix = 16;
  WriteRaw<uint8_t>(tmp.File("b.nii"), bitpix, std::vector<uint8_t>(24, 0));
  try {
    nifti::Read(tmp.File("b.nii"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("bitpix"), std::string::npos);
  }

  RawHeader truncated;
  WriteRaw<uint8_t>(tmp.File("c.nii"), truncated, std::vector<uint8_t>(5, 0));
  EXPECT_THROW(nifti::Read(tmp.File("c.nii")), FormatError);
}

TEST(Nifti, UnsupportedDatatype) {
  TempDir tmp;
  RawHeader h;
  h.datatype = 32;  // complex64
  h.bitpix = 64;
  WriteRaw<uint64_t>(tmp.File("c.nii"), h, std::vector<uint64_t>(24, 0));
  EXPECT_THROW(nifti::Read(tmp.File("c.nii")), UnsupportedTypeError);
}

TEST(Nifti, FourDimensional) {
  TempDir tmp;
  RawHeader singleton;
  singleton.dim = {4, 4, 3, 2, 1, 1, 1, 1};
  WriteRaw<uint8_t>(tmp.File("s.nii"), singleton, std::vector<uint8_t>(24, 1));
  EXPECT_NO_THROW(nifti::Read(tmp.File("s.nii")));

  RawHeader series;
  series.dim = {4, 4, 3, 2, 2, 1, 1, 1};
  WriteRaw<uint8_t>(tmp.File("t.nii"), series, std::vector<uint8_t>(48, 1));
  EXPECT_THROW(nifti::Read(tmp.File("t.nii")), DimensionalityError);
}

TEST(Nifti, BigEndianWithScaling) {
  TempDir tmp;
  RawHeader h;
  h.datatype = 4;
  h.bitpix = 16;
  h.scl_slope = 0.5f;
  h.scl_inter = 10.0f;
  h.pixdim = {1, 0.8f, 0.9f, 2.5f, 1, 1, 1, 1};
  std::vector<int16_t> data(24);
  for (int i = 0; i < 24; ++i) data[i] = static_cast<int16_t>(i * 100 - 700);
  WriteRaw<int16_t>(tmp.File("be.nii"), h, data, /*big_endian=*/true);
  const Volume vol = nifti::ReadVolume(tmp.File("be.nii"));
  for (int i = 0; i < 24; ++i) EXPECT_FLOAT_EQ(vol[i], 0.5f * data[i] + 10.0f);
  EXPECT_NEAR(vol.grid().spacing()[0], 0.8, 1e-6);
  EXPECT_NEAR(vol.grid().spacing()[2], 2.5, 1e-6);
  EXPECT_EQ(nifti::ReadHeader(tmp.File("be.nii")).affine_source, "pixdim");
  EXPECT_TRUE(nifti::ReadHeader(tmp.File("be.nii")).big_endian);
}

TEST(Nifti, ZeroSlopeMeansNoScaling) {
  TempDir tmp;
  RawHeader h;
  h.scl_slope = 0.0f;
  WriteRaw<uint8_t>(tmp.File("z.nii"), h, std::vector<uint8_t>(24, 7));
  const Volume vol = nifti::ReadVolume(tmp.File("z.nii"));
  EXPECT_EQ(vol[0], 7.0f);
}

TEST(Nifti, SformPreferredOverQform) {
  TempDir tmp;
  RawHeader h;
  h.qform_code = 1;
  h.pixdim = {1, 2, 2, 2, 1, 1, 1, 1};
  h.qoffset = {5, 6, 7};
  h.sform_code = 1;
  h.srow = {{{3, 0, 0, -1}, {0, 3, 0, -2}, {0, 0, 3, -3}}};
  WriteRaw<uint8_t>(tmp.File("s.nii"), h, std::vector<uint8_t>(24, 0));
  nifti::HeaderInfo info = nifti::ReadHeader(tmp.File("s.nii"));
  EXPECT_EQ(info.affine_source, "sform");
  EXPECT_NEAR(info.grid.spacing()[0], 3.0, 1e-6);
  EXPECT_NEAR(info.grid.affine()(2, 3), -3.0, 1e-6);

  h.sform_code = 0;
  WriteRaw<uint8_t>(tmp.File("q.nii"), h, std::vector<uint8_t>(24, 0));
  info = nifti::ReadHeader(tmp.File("q.nii"));
  EXPECT_EQ(info.affine_source, "qform");
  EXPECT_NEAR(info.grid.spacing()[1], 2.0, 1e-6);
  EXPECT_NEAR(info.grid.affine()(0, 3), 5.0, 1e-6);
}

TEST(Nifti, QformQuaternionRotation) {
  // 90 degrees about z: b = c = 0, d = sin(45deg).
  TempDir tmp;
  RawHeader h;
  h.qform_code = 1;
  h.quatern = {0.0f, 0.0f, static_cast<float>(std::sqrt(0.5))};
  WriteRaw<uint8_t>(tmp.File("r.nii"), h, std::vector<uint8_t>(24, 0));
  const Eigen::Matrix4d m = nifti::ReadHeader(tmp.File("r.nii")).grid.affine();
  EXPECT_NEAR(m(0, 1), -1.0, 1e-6);
  EXPECT_NEAR(m(1, 0), 1.0, 1e-6);
  EXPECT_NEAR(m(0, 0), 0.0, 1e-6);
}

TEST(Nifti, LabelMapRoundTripIsVoxelExact) {
  TempDir tmp;
  std::mt19937_64 rng(3);
  const Grid grid({20, 17, 9}, {0.7, 1.1, 2.3});
  const LabelMap labels = testing::RandomBoxLabels(rng, grid, 8, 12);
  nifti::Write(labels, tmp.File("l.nii.gz"));
  const LabelMap back = nifti::ReadLabelMap(tmp.File("l.nii.gz"));
  ASSERT_EQ(back.size(), labels.size());
  for (int64_t i = 0; i < labels.size(); ++i) ASSERT_EQ(back[i], labels[i]);
}

TEST(Nifti, WideLabelIdsSurvive) {
  TempDir tmp;
  const Grid grid({3, 1, 1}, {1, 1, 1});
  const LabelMap labels = LabelMap::WithDerivedVocabulary(grid, {0, 300, 70000});
  nifti::Write(labels, tmp.File("w.nii"));
  const LabelMap back = nifti::ReadLabelMap(tmp.File("w.nii"));
  EXPECT_EQ(back[1], 300);
  EXPECT_EQ(back[2], 70000);
}

TEST(Nifti, ObliqueAffineRoundTrip) {
  TempDir tmp;
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();
  affine.topLeftCorner<3, 3>() =
      Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix() *
      Eigen::Vector3d(1.0, 1.2, 3.0).asDiagonal();
  affine.topRightCorner<3, 1>() << -90.5, 12.25, 40.0;
  const Grid grid = Grid::FromAffine({5, 6, 7}, affine);
  nifti::Write(Volume::Filled(grid, 1.0f), tmp.File("o.nii"));
  const nifti::HeaderInfo info = nifti::ReadHeader(tmp.File("o.nii"));
  EXPECT_LE((info.grid.affine() - affine).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Nifti, UnwritableDestinationIsIoError) {
  const Grid grid({2, 2, 2}, {1, 1, 1});
  EXPECT_THROW(nifti::Write(Volume::Filled(grid, 0.f),
                            "/nonexistent_dir_ulfsynth/x.nii"),
               IoError);
  EXPECT_THROW(nifti::ReadVolume("/nonexistent_dir_ulfsynth/x.nii"), IoError);
}

TEST(Nifti, NonIntegralLabelsRejected) {
  TempDir tmp;
  const Grid grid({2, 1, 1}, {1, 1, 1});
  nifti::Write(Volume(grid, {0.0f, 1.5f}), tmp.File("f.nii"));
  EXPECT_THROW(nifti::ReadLabelMap(tmp.File("f.nii")), FormatError);
}

// ---------------------------------------------------------------- Resample

TEST(Resample, IdentityGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  const Grid grid({9, 8, 7}, {1.5, 1.0, 2.0});
  std::vector<float> data(grid.num_voxels());
  for (float& v : data) v = u(rng);
  const Volume vol(grid, data);
  const Volume out = Resample(vol, grid, Interpolation::kLinear);
  for (int64_t i = 0; i < vol.size(); ++i) {
    EXPECT_NEAR(out[i], vol[i], 1e-6 * std::abs(vol[i]) + 1e-7);
  }
}

TEST(Resample, ConstantInsideExtent) {
  const Grid source({20, 20, 20}, {1, 1, 1});
  Eigen::Matrix4d target_affine = Eigen::Matrix4d::Identity();
  target_affine.topLeftCorner<3, 3>() =
      Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitY()).toRotationMatrix() * 1.3;
  target_affine.topRightCorner<3, 1>() << 6, 5, 7;
  const Grid target = Grid::FromAffine({5, 5, 5}, target_affine);
  const Volume out = Resample(Volume::Filled(source, 3.25f), target,
                              Interpolation::kLinear);
  for (float v : out.data()) EXPECT_NEAR(v, 3.25f, 1e-5);
}

TEST(Resample, RampToCoarseGrid) {
  // Linear interpolation is exact on an affine ramp, so each coarse voxel
  // must carry the ramp evaluated at its center (2p + 0.5 in source index).
  const Grid fine({64, 64, 64}, {1, 1, 1});
  const Volume ramp = RampVolume(fine, 0.5, -0.25, 2.0, 3.0);
  Eigen::Matrix4d coarse_affine = Eigen::Matrix4d::Identity() * 2.0;
  coarse_affine(3, 3) = 1.0;
  coarse_affine.topRightCorner<3, 1>().setConstant(0.5);
  const Grid coarse = Grid::FromAffine({32, 32, 32}, coarse_affine);
  const Volume out = Resample(ramp, coarse, Interpolation::kLinear);
  for (int64_t r = 0; r < 32; ++r)
    for (int64_t q = 0; q < 32; ++q)
      for (int64_t p = 0; p < 32; ++p) {
        const double expected =
            0.5 * (2 * p + 0.5) - 0.25 * (2 * q + 0.5) + 2.0 * (2 * r + 0.5) + 3.0;
        ASSERT_NEAR(out.at(p, q, r), expected, 1e-5 * std::abs(expected) + 1e-5);
      }
}

TEST(Resample, OutOfBoundsIsZero) {
  const Grid source({4, 4, 4}, {1, 1, 1});
  Eigen::Matrix4d shifted = Eigen::Matrix4d::Identity();
  shifted(0, 3) = 10.0;
  const Volume out = Resample(Volume::Filled(source, 1.0f),
                              Grid::FromAffine({4, 4, 4}, shifted), Interpolation::kLinear);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
  const Volume clamped =
      Resample(Volume::Filled(source, 1.0f), Grid::FromAffine({4, 4, 4}, shifted),
               Interpolation::kLinear, Boundary::kClamp);
  for (float v : clamped.data()) EXPECT_EQ(v, 1.0f);
}

TEST(Resample, LinearOnLabelsIsContractError) {
  const Grid grid({4, 4, 4}, {1, 1, 1});
  const LabelMap labels(grid, std::vector<Label>(64, 0), {});
  EXPECT_THROW(Resample(labels, grid, Interpolation::kLinear), ContractError);
}

TEST(Resample, PropertiesOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-0.5, 0.5), shift(-3, 3),
      scale(0.6, 1.8);
  std::uniform_real_distribution<float> value(0.25f, 4.0f);
  const Grid source({12, 10, 9}, {1.0, 1.2, 1.5});
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
    t.topLeftCorner<3, 3>() =
        Eigen::AngleAxisd(angle(rng), Eigen::Vector3d(angle(rng), 1, angle(rng)).normalized())
            .toRotationMatrix() *
        Eigen::Vector3d(scale(rng), scale(rng), scale(rng)).asDiagonal();
    t.topRightCorner<3, 1>() << shift(rng), shift(rng), shift(rng);
    const Grid target = Grid::FromAffine({8, 9, 7}, t);

    const LabelMap labels = testing::RandomBoxLabels(rng, source, 5, 6);
    const LabelMap resampled = Resample(labels, target);
    for (Label l : resampled.data()) {
      ASSERT_TRUE(l == 0 || labels.vocabulary().contains(l));
    }

    std::vector<float> data(source.num_voxels());
    for (float& v : data) v = value(rng);
    const Volume vol(source, data);
    const Volume out = Resample(vol, target, Interpolation::kLinear);
    for (float v : out.data()) {
      ASSERT_TRUE(v == 0.0f || (v >= vol.Min() - 1e-6f && v <= vol.Max() + 1e-6f));
    }
  }
}

// ---------------------------------------------------------------- Warp

TEST(Warp, ZeroFieldIsIdentity) {
  std::mt19937_64 rng(2);
  const Grid grid({10, 11, 12}, {1.0, 0.5, 2.0});
  const LabelMap labels = testing::RandomBoxLabels(rng, grid, 4, 5);
  const DisplacementField zero(grid);
  const LabelMap warped = Warp(labels, zero);
  for (int64_t i = 0; i < labels.size(); ++i) ASSERT_EQ(warped[i], labels[i]);

  std::uniform_real_distribution<float> u(0.1f, 1.0f);
  std::vector<float> data(grid.num_voxels());
  for (float& v : data) v = u(rng);
  const Volume vol(grid, data);
  const Volume w = Warp(vol, zero, Interpolation::kLinear);
  for (int64_t i = 0; i < vol.size(); ++i) ASSERT_NEAR(w[i], vol[i], 1e-6 * vol[i]);
}

TEST(Warp, UniformFieldShiftsByWholeVoxels) {
  // Backward mapping: out(i) = in(i + 2) along axis 0 on a 1 mm grid.
  std::mt19937_64 rng(4);
  const Grid grid({16, 6, 5}, {1, 1, 1});
  const LabelMap labels = testing::RandomBoxLabels(rng, grid, 3, 6);
  const DisplacementField field(
      grid, std::vector<DisplacementField::Vector>(grid.num_voxels(), {2, 0, 0}));
  const LabelMap warped = Warp(labels, field);
  for (int64_t k = 0; k < 5; ++k)
    for (int64_t j = 0; j < 6; ++j)
      for (int64_t i = 0; i < 16; ++i) {
        const Label expected = i + 2 < 16 ? labels.at(i + 2, j, k) : 0;
        ASSERT_EQ(warped.at(i, j, k), expected);
      }
}

TEST(Warp, UniformFieldsCompose) {
  std::mt19937_64 rng(8);
  const Grid grid({14, 13, 12}, {1, 1, 1});
  const LabelMap labels = testing::RandomBoxLabels(rng, grid, 4, 8);
  auto uniform = [&](float x, float y, float z) {
    return DisplacementField(grid, std::vector<DisplacementField::Vector>(
                                       grid.num_voxels(), {x, y, z}));
  };
  const LabelMap twice = Warp(Warp(labels, uniform(1, -2, 0)), uniform(2, 1, 1));
  const LabelMap once = Warp(labels, uniform(3, -1, 1));
  // Interior region: unaffected by zero fill from either step.
  for (int64_t k = 2; k < 9; ++k)
    for (int64_t j = 3; j < 9; ++j)
      for (int64_t i = 0; i < 9; ++i) ASSERT_EQ(twice.at(i, j, k), once.at(i, j, k));
}

TEST(Warp, FieldGridMismatchIsContractError) {
  const Grid grid({4, 4, 4}, {1, 1, 1});
  const Grid other({4, 4, 5}, {1, 1, 1});
  EXPECT_THROW(Warp(Volume::Filled(grid, 1.f), DisplacementField(other),
                    Interpolation::kLinear),
               ContractError);
}

TEST(Warp, LabelsStayInVocabulary) {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> n(0.f, 3.f);
  const Grid grid({10, 10, 10}, {1, 1, 1});
  const LabelMap labels = testing::RandomBoxLabels(rng, grid, 6, 10);
  std::vector<DisplacementField::Vector> vecs(grid.num_voxels());
  for (auto& v : vecs) v = {n(rng), n(rng), n(rng)};
  const LabelMap warped = Warp(labels, DisplacementField(grid, vecs));
  for (Label l : warped.data()) ASSERT_TRUE(l == 0 || labels.vocabulary().contains(l));
}

// ---------------------------------------------------------------- Filter

TEST(Filter, ConstantStaysConstantAndKernelSumsToOne) {
  const Grid grid({12, 9, 7}, {1, 2, 0.5});
  const Volume out = GaussianSmooth(Volume::Filled(grid, 0.4f), {1.5, 2.0, 0.7});
  for (float v : out.data()) EXPECT_NEAR(v, 0.4f, 1e-6);
  double sum = 0;
  for (double w : GaussianKernel(2.3)) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Filter, MatchesDirectConvolutionAlongOneAxis) {
  const Grid grid({15, 3, 2}, {1, 1, 1});
  std::vector<float> data(grid.num_voxels(), 0.0f);
  data[grid.Offset(7, 1, 1)] = 1.0f;
  const double sigma = 1.3;
  const Volume out = GaussianSmooth(Volume(grid, data), {sigma, 0, 0});
  double norm = 0;
  for (int t = -6; t <= 6; ++t) norm += std::exp(-0.5 * t * t / (sigma * sigma));
  for (int64_t i = 0; i < 15; ++i) {
    const double expected =
        std::abs(i - 7) <= 6 ? std::exp(-0.5 * (i - 7) * (i - 7) / (sigma * sigma)) / norm : 0.0;
    EXPECT_NEAR(out.at(i, 1, 1), expected, 1e-6);
    EXPECT_EQ(out.at(i, 0, 1), 0.0f);
  }
}

}  // namespace
}  // namespace ulfsynth
