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
#include <complex>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "ulfsynth/synthgen/artifacts.h"
#include "ulfsynth/synthgen/kspace.h"
#include "ulfsynth/util/errors.h"

namespace ulfsynth {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

Volume RandomUnitVolume(uint64_t seed, const Grid& grid) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.05f, 0.95f);
  std::vector<float> data(grid.num_voxels());
  for (float& v : data) v = u(rng);
  return Volume(grid, std::move(data));
}

double MaxRelativeError(const Volume& a, const Volume& b) {
  double scale = 0, err = 0;
  for (int64_t o = 0; o < a.size(); ++o) {
    scale = std::max(scale, std::abs(static_cast<double>(b[o])));
    err = std::max(err, std::abs(static_cast<double>(a[o]) - b[o]));
  }
  return err / scale;
}

bool Identical(const Volume& a, const Volume& b) {
  return std::equal(a.data().begin(), a.data().end(), b.data().begin(), b.data().end());
}

// 1-D DFT filter along `axis` computed the slow way: per line, transform,
// keep or scale bins by `gain(signed k)`, transform back.
template <typename Gain>
std::vector<double> NaiveAxisFilter(const Volume& v, int axis, Gain gain) {
  const Grid& g = v.grid();
  const int64_t n = g.dims()[axis];
  std::vector<double> out(v.size());
  for (int64_t o = 0; o < v.size(); ++o) {
    Index3 idx = g.IndexOf(o);
    if (idx[axis] != 0) continue;
    std::vector<double> line(n);
    for (int64_t p = 0; p < n; ++p) {
      idx[axis] = p;
      line[p] = v.at(idx[0], idx[1], idx[2]);
    }
    std::vector<std::complex<double>> spec(n);
    for (int64_t k = 0; k < n; ++k) {
      for (int64_t p = 0; p < n; ++p) {
        spec[k] += line[p] * std::polar(1.0, -2 * kPi * k * p / n);
      }
      spec[k] *= gain(k <= n / 2 ? k : k - n);
    }
    for (int64_t p = 0; p < n; ++p) {
      std::complex<double> s = 0;
      for (int64_t k = 0; k < n; ++k) s += spec[k] * std::polar(1.0, 2 * kPi * k * p / n);
      idx[axis] = p;
      out[g.Offset(idx[0], idx[1], idx[2])] = s.real() / n;
    }
  }
  return out;
}

// ---- ghosting ----

TEST(Ghosting, ZeroIntensityIsIdentity) {
  const Volume v = RandomUnitVolume(1, Grid({16, 12, 10}, {1, 1, 1}));
  for (int axis = 0; axis < 3; ++axis) {
    const Volume out = ApplyGhosting(v, {axis, 3, 0.0, 0.06});
    EXPECT_LE(MaxRelativeError(out, v), 1e-5);
  }
}

TEST(Ghosting, DeltaReplicaAtHalfFieldOfView) {
  // Delta of height 0.4 on a 0.5 background; g = 2, s = 1, only the DC
  // plane protected.
  const Grid grid({8, 32, 6}, {1, 1, 1});
  std::vector<float> data(grid.num_voxels(), 0.5f);
  const Index3 at{3, 5, 2};
  data[grid.Offset(at[0], at[1], at[2])] = 0.9f;
  const Volume v(grid, data);
  const int axis = 1;
  const int64_t n = grid.dims()[axis];
  const GhostingParams p{axis, 2, 1.0, 0.06};
  ASSERT_LT(p.restore * n / 2, 1.0);
  const Volume out = ApplyGhosting(v, p);

  // Comb identity: dropping even non-DC harmonics leaves
  // x[y] - (x[y] + x[y + n/2]) / 2 + mean(line).
  for (int64_t o = 0; o < v.size(); ++o) {
    const Index3 i = grid.IndexOf(o);
    double mean = 0;
    for (int64_t y = 0; y < n; ++y) mean += v.at(i[0], y, i[2]);
    mean /= n;
    const double x = v[o];
    const double partner = v.at(i[0], (i[1] + n / 2) % n, i[2]);
    const double expected = x - (x + partner) / 2 + mean;
    ASSERT_NEAR(out[o], expected, 1e-6) << o;
  }
  // Independent slow DFT gives the same field.
  const std::vector<double> naive = NaiveAxisFilter(
      v, axis, [](int64_t k) { return (k % 2 == 0 && k != 0) ? 0.0 : 1.0; });
  for (int64_t o = 0; o < v.size(); ++o) ASSERT_NEAR(out[o], naive[o], 1e-6);

  // The replica sits half a field of view away and is the only other voxel
  // departing from that line's background. Other lines are untouched.
  const float background = out.at(at[0], at[1] + 1, at[2]);
  const float replica = out.at(at[0], at[1] + n / 2, at[2]);
  EXPECT_NEAR(replica - background, -0.2f, 1e-6);
  EXPECT_NEAR(out.at(at[0], at[1], at[2]) - background, 0.2f, 1e-6);
  int departures = 0;
  for (int64_t y = 0; y < n; ++y) {
    departures += std::abs(out.at(at[0], y, at[2]) - background) > 1e-4;
  }
  EXPECT_EQ(departures, 2);
  EXPECT_NEAR(out.at(0, 0, 0), 0.5f, 1e-6);
}

TEST(Ghosting, GeneralCombMatchesSlowDft) {
  const Volume v = RandomUnitVolume(3, Grid({9, 10, 20}, {1, 1, 1}));
  const GhostingParams p{2, 3, 0.6, 0.2};
  const Volume out = ApplyGhosting(v, p);
  const double protect = p.restore * 20 / 2;
  const std::vector<double> naive = NaiveAxisFilter(v, 2, [&](int64_t k) {
    return (k % 3 == 0 && std::abs(k) >= protect) ? 0.4 : 1.0;
  });
  for (int64_t o = 0; o < v.size(); ++o) {
    ASSERT_NEAR(out[o], std::clamp(naive[o], 0.0, 1.0), 1e-6);
  }
}

TEST(Ghosting, SeededSamplingIsDeterministic) {
  const GhostingConfig c;
  Rng a(5), b(5);
  const GhostingParams pa = SampleGhostingParams(a, c);
  const GhostingParams pb = SampleGhostingParams(b, c);
  EXPECT_EQ(ToJson(pa), ToJson(pb));
  EXPECT_GE(pa.num_ghosts, 2);
  EXPECT_LE(pa.num_ghosts, 5);
  const Volume v = RandomUnitVolume(4, Grid({12, 12, 12}, {1, 1, 1}));
  EXPECT_TRUE(Identical(ApplyGhosting(v, pa), ApplyGhosting(v, pb)));
  EXPECT_EQ(ToJson(GhostingParamsFromJson(ToJson(pa))), ToJson(pa));
}

// ---- spikes ----

TEST(Spike, NoSpikesOrZeroIntensityIsIdentity) {
  const Volume v = RandomUnitVolume(6, Grid({10, 8, 6}, {1, 1, 1}));
  EXPECT_LE(MaxRelativeError(ApplySpikes(v, {}), v), 1e-5);
  SpikeParams zero;
  zero.spikes.push_back({{2, 1, 1}, 0.0, 1.0});
  EXPECT_LE(MaxRelativeError(ApplySpikes(v, zero), v), 1e-5);
  SpikeConfig none;
  none.num_spikes = {0, 0};
  Rng rng(1);
  EXPECT_TRUE(SampleSpikeParams(rng, none, {10, 8, 6}).spikes.empty());
}

TEST(Spike, SingleSpikeOnConstantImageIsASinusoid) {
  const Grid grid({8, 10, 12}, {1, 1, 1});
  const double c = 0.5;
  const Volume v = Volume::Filled(grid, static_cast<float>(c));
  const Spike s{{2, 3, 1}, 0.3, 0.7};
  const Volume out = ApplySpikes(v, {{s}});
  // max|k| of a constant image is the DC bin, c * N; after the 1/N inverse
  // the added wave has amplitude intensity * c.
  for (int64_t o = 0; o < v.size(); ++o) {
    const Index3 x = grid.IndexOf(o);
    double phase = s.phase;
    for (int a = 0; a < 3; ++a) {
      phase += 2 * kPi * static_cast<double>(s.bin[a] * x[a]) / grid.dims()[a];
    }
    ASSERT_NEAR(out[o], std::clamp(c + s.intensity * c * std::cos(phase), 0.0, 1.0), 1e-6);
  }
}

TEST(Spike, SampledBinsAreNeverDc) {
  SpikeConfig c;
  c.num_spikes = {3, 3};
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const SpikeParams p = SampleSpikeParams(rng, c, {2, 2, 1});
    ASSERT_EQ(p.spikes.size(), 3u);
    for (const Spike& s : p.spikes) {
      ASSERT_NE(s.bin, (Index3{0, 0, 0}));
      ASSERT_LT(s.bin[0], 2);
      ASSERT_LT(s.bin[1], 2);
      ASSERT_EQ(s.bin[2], 0);
    }
  }
  SpikeParams dc;
  dc.spikes.push_back({{0, 0, 0}, 0.1, 0});
  EXPECT_THROW(ApplySpikes(Volume::Filled(Grid({2, 2, 2}, {1, 1, 1}), 0.5f), dc),
               ContractError);
}

// ---- motion ----

TEST(Motion, NoMovementOrIdentityMovementIsIdentity) {
  const Volume v = RandomUnitVolume(7, Grid({12, 10, 8}, {1, 1, 1}));
  EXPECT_LE(MaxRelativeError(ApplyMotion(v, {1, {}, {}}), v), 1e-5);
  const MotionParams still{1, {RigidParams{}}, {5}};
  EXPECT_LE(MaxRelativeError(ApplyMotion(v, still), v), 1e-5);
}

TEST(Motion, TranslatedHalfKeepsEnergy) {
  // Smooth blob (sigma 6 voxels) well inside the field of view. Taking the
  // real part of the spliced spectrum drops some energy; for content this
  // smooth relative to the shift the loss stays small.
  const Grid grid({32, 32, 32}, {1, 1, 1});
  std::vector<float> data(grid.num_voxels());
  for (int64_t o = 0; o < grid.num_voxels(); ++o) {
    const Index3 i = grid.IndexOf(o);
    double r2 = 0;
    for (int a = 0; a < 3; ++a) r2 += (i[a] - 15.5) * (i[a] - 15.5);
    data[o] = static_cast<float>(0.8 * std::exp(-r2 / 72.0));
  }
  const Volume v(grid, data);
  RigidParams shift;
  shift.translation_mm = {2, 0, 0};
  const MotionParams p{0, {shift}, {16}};
  const Volume out = ApplyMotion(v, p);
  // Energy via Parseval on both spectra.
  auto energy = [](const Volume& x) {
    double e = 0;
    for (const Complex& c : ForwardFft(x)) e += std::norm(c);
    return e / x.size();
  };
  const double e_in = energy(v), e_out = energy(out);
  EXPECT_NEAR(e_out / e_in, 1.0, 0.05);
  double direct = 0;
  for (int64_t o = 0; o < v.size(); ++o) direct += static_cast<double>(v[o]) * v[o];
  EXPECT_NEAR(e_in, direct, 1e-6 * direct);
  EXPECT_FALSE(Identical(out, v));
}

TEST(Motion, CentreBlockKeepsTheUnmovedSpectrum) {
  // With a cut at the last bin only the k = 4 plane comes from the moved
  // copy; the real part also mixes it into its mirror k = -4.
  // Values kept mid-range so the final clamp never engages.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> u(0.4f, 0.6f);
  std::vector<float> data(1000);
  for (float& x : data) x = u(rng);
  const Volume v(Grid({10, 10, 10}, {1, 1, 1}), data);
  RigidParams big;
  big.translation_mm = {0, 0, 3};
  const Volume out = ApplyMotion(v, {2, {big}, {9}});
  const std::vector<Complex> kin = ForwardFft(v), kout = ForwardFft(out);
  const Grid& g = v.grid();
  for (int64_t o = 0; o < v.size(); ++o) {
    const int64_t kz = g.IndexOf(o)[2];
    if (kz == 4 || kz == 6) continue;
    ASSERT_LT(std::abs(kin[o] - kout[o]), 1e-4 * (1 + std::abs(kin[o]))) << o;
  }
}

TEST(Motion, SampledCutsAreSortedAndDistinct) {
  MotionConfig c;
  c.num_movements = {3, 3};
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const MotionParams p = SampleMotionParams(rng, c, {16, 5, 3});
    const int64_t n = std::array<int64_t, 3>{16, 5, 3}[p.axis];
    ASSERT_EQ(p.movements.size(), std::min<size_t>(3, n - 1));
    ASSERT_EQ(p.cuts.size(), p.movements.size());
    for (size_t i = 0; i < p.cuts.size(); ++i) {
      ASSERT_GE(p.cuts[i], 1);
      ASSERT_LE(p.cuts[i], n - 1);
      if (i) ASSERT_LT(p.cuts[i - 1], p.cuts[i]);
    }
    for (const RigidParams& r : p.movements) {
      for (double a : r.rotation_deg) ASSERT_LE(std::abs(a), 10.0);
      for (double x : r.translation_mm) ASSERT_LE(std::abs(x), 10.0);
    }
  }
  EXPECT_THROW(ApplyMotion(Volume::Filled(Grid({4, 4, 4}, {1, 1, 1}), 0.5f),
                           {0, {RigidParams{}}, {0}}),
               ContractError);
}

TEST(Artifacts, FixedSeedGivesBitIdenticalOutputs) {
  const Grid grid({14, 12, 10}, {1, 1, 1});
  const Volume v = RandomUnitVolume(10, grid);
  for (int rep = 0; rep < 2; ++rep) {
    Rng a(31), b(31);
    EXPECT_TRUE(Identical(ApplySpikes(v, SampleSpikeParams(a, {}, grid.dims())),
                          ApplySpikes(v, SampleSpikeParams(b, {}, grid.dims()))));
    EXPECT_TRUE(Identical(ApplyMotion(v, SampleMotionParams(a, {}, grid.dims())),
                          ApplyMotion(v, SampleMotionParams(b, {}, grid.dims()))));
  }
  Rng r(3);
  const MotionParams m = SampleMotionParams(r, {}, grid.dims());
  EXPECT_EQ(ToJson(MotionParamsFromJson(json::parse(ToJson(m).dump()))), ToJson(m));
  const SpikeParams s = SampleSpikeParams(r, {}, grid.dims());
  EXPECT_EQ(ToJson(SpikeParamsFromJson(json::parse(ToJson(s).dump()))), ToJson(s));
}

TEST(Artifacts, OutputsStayFiniteAndInRange) {
  const Grid grid({16, 16, 16}, {1, 1, 1});
  Rng rng(12);
  GhostingConfig gc;
  SpikeConfig sc;
  sc.intensity = {2.0, 5.0};
  for (int t = 0; t < 10; ++t) {
    const Volume v = RandomUnitVolume(100 + t, grid);
    for (const Volume& out :
         {ApplyGhosting(v, SampleGhostingParams(rng, gc)),
          ApplySpikes(v, SampleSpikeParams(rng, sc, grid.dims())),
          ApplyMotion(v, SampleMotionParams(rng, {}, grid.dims()))}) {
      for (float x : out.data()) {
        ASSERT_TRUE(std::isfinite(x));
        ASSERT_GE(x, 0.0f);
        ASSERT_LE(x, 1.0f);
      }
    }
  }
}

}  // namespace
}  // namespace ulfsynth
