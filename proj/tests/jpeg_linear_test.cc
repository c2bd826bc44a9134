// Copyright (c) the jpegspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jpegspace/jpeg_linear.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "jpegspace/harmonic.h"
#include "jpegspace/pixel_ops.h"
#include "test_util.h"

namespace jpegspace {
namespace {

using testing_util::RandomTensor;

QuantizationMatrix RandomQ(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(1, 255);
  std::array<int, 64> q{};
  for (int& v : q) v = u(rng);
  return QuantizationMatrix::FromZigzag(q);
}

LabeledTensor RandomImage(size_t h, size_t w, std::mt19937_64& rng) {
  return RandomTensor({{"h", h}, {"w", w}}, rng, -128, 127);
}

// Procedural coefficients: blockwise DCT of an already centred plane, divided
// by Q, with no rounding.
LabeledTensor ProceduralCompress(const LabeledTensor& image,
                                 const QuantizationMatrix& q) {
  LabeledTensor shifted = image;
  for (double& v : shifted.mutable_data()) v += 128.0;
  CoefficientGrid g = ForwardBlocks(shifted);
  auto& d = g.blocks.mutable_data();
  for (size_t i = 0; i < d.size(); ++i) d[i] /= q.zigzag(i % 64);
  return g.blocks;
}

TEST(BlockifyTest, SixteenSquareIsTwoByTwoGrid) {
  const LinearJpegMap b = BuildBlockify(16, 16);
  EXPECT_EQ(b.tensor.Labels(),
            (std::vector<std::string>{"x", "y", "i", "j", "h", "w"}));
  EXPECT_EQ(b.tensor.Extent("x"), 2u);
  EXPECT_EQ(b.tensor.Extent("y"), 2u);
  EXPECT_EQ(b.tensor.at(1, 0, 3, 5, 11, 5), 1.0);
  EXPECT_EQ(b.tensor.at(0, 1, 3, 5, 11, 5), 0.0);
}

TEST(BlockifyTest, SingleBlockIsTheInput) {
  std::mt19937_64 rng(1);
  const LabeledTensor img = RandomImage(8, 8, rng);
  const LabeledTensor blocks =
      Contract(BuildBlockify(8, 8).tensor, img, {"x", "y", "i", "j"});
  EXPECT_EQ(blocks.data(), img.data());
}

TEST(BlockifyTest, BlocksAreSlicesAndEntriesAreOneHot) {
  std::mt19937_64 rng(2);
  const LabeledTensor img = RandomImage(24, 16, rng);
  const LinearJpegMap b = BuildBlockify(24, 16);
  const LabeledTensor blocks = Contract(b.tensor, img, {"x", "y", "i", "j"});
  for (size_t x = 0; x < 3; ++x) {
    for (size_t y = 0; y < 2; ++y) {
      for (size_t i = 0; i < 8; ++i) {
        for (size_t j = 0; j < 8; ++j) {
          EXPECT_EQ(blocks.at(x, y, i, j), img.at(8 * x + i, 8 * y + j));
        }
      }
    }
  }
  // One 1 per pixel; all other entries 0.
  const LabeledTensor counts = Contract(b.tensor, LabeledTensor::Scalar(1.0), {"h", "w"});
  for (double c : counts.data()) EXPECT_EQ(c, 1.0);
  for (double v : b.tensor.data()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  // Isometry: B permutes samples, so the sorted samples, and hence the
  // energy summed in a fixed order, agree exactly.
  std::vector<double> in = img.data(), out = blocks.data();
  std::sort(in.begin(), in.end());
  std::sort(out.begin(), out.end());
  EXPECT_EQ(in, out);
  double e_in = 0.0, e_out = 0.0;
  for (double v : in) e_in += v * v;
  for (double v : out) e_out += v * v;
  EXPECT_EQ(e_in, e_out);
}

TEST(BlockifyTest, RejectsPartialBlocks) {
  EXPECT_JS_ERROR(BuildBlockify(12, 8), ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(ComposeJpeg(8, 20, QuantizationMatrix()),
                  ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(ComposeJpeg(8, 72, QuantizationMatrix()), ErrorCode::kOutOfRange);
}

TEST(DctMapTest, MatchesProceduralTransform) {
  std::mt19937_64 rng(3);
  const LinearJpegMap d = BuildDctMap();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LabeledTensor block = RandomTensor({{"i", 8}, {"j", 8}}, rng, -128, 127);
    const LabeledTensor via_map = Contract(d.tensor, block, {"a", "b"});
    const LabeledTensor direct = Dct2Forward(block.Relabeled({{"i", "m"}, {"j", "n"}}));
    for (size_t n = 0; n < 64; ++n) {
      worst = std::max(worst, std::abs(via_map.data()[n] - direct.data()[n]));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(ZigzagMapTest, PermutationWithKnownEntries) {
  const LinearJpegMap z = BuildZigzagMap();
  LabeledTensor block({{"a", 8}, {"b", 8}});
  block.at(0, 1) = 1.0;
  const LabeledTensor v = Contract(z.tensor, block, {"z"});
  for (size_t k = 0; k < 64; ++k) EXPECT_EQ(v.at(k), k == 1 ? 1.0 : 0.0);
  // (1, 0) is the third entry of the scan.
  block.at(0, 1) = 0.0;
  block.at(1, 0) = 1.0;
  EXPECT_EQ(Contract(z.tensor, block, {"z"}).at(2), 1.0);
  const LabeledTensor rows = Contract(z.tensor, LabeledTensor::Scalar(1.0), {"z"});
  const LabeledTensor cols = Contract(z.tensor, LabeledTensor::Scalar(1.0), {"a", "b"});
  for (double c : rows.data()) EXPECT_EQ(c, 1.0);
  for (double c : cols.data()) EXPECT_EQ(c, 1.0);
}

TEST(ScaleMapTest, AllOnesIsIdentityAndInverseCancels) {
  const LinearJpegMap s1 = BuildScaleMap(QuantizationMatrix());
  for (size_t k = 0; k < 64; ++k) {
    for (size_t z = 0; z < 64; ++z) EXPECT_EQ(s1.tensor.at(k, z), k == z ? 1.0 : 0.0);
  }
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantizationMatrix q = RandomQ(rng);
    const LabeledTensor s = BuildScaleMap(q).tensor;
    const LabeledTensor s_inv = BuildScaleInverseMap(q).tensor.Relabeled({{"k", "c"}, {"z", "k"}});
    // S~[c, k] S[k, z] summed over k.
    const LabeledTensor prod = Contract(s_inv, s, {"c", "z"});
    for (size_t c = 0; c < 64; ++c) {
      for (size_t z = 0; z < 64; ++z) {
        EXPECT_NEAR(prod.at(c, z), c == z ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(ComposeTest, FactorsAndAxes) {
  const JpegMaps maps = ComposeJpeg(16, 8, QualityToMatrix(50, PlaneKind::kLuma));
  EXPECT_EQ(maps.compress.tensor.Labels(),
            (std::vector<std::string>{"x", "y", "k", "h", "w"}));
  EXPECT_EQ(maps.decompress.tensor.Labels(), maps.compress.tensor.Labels());
  EXPECT_EQ(maps.compress.factors,
            (std::vector<MapKind>{MapKind::kBlockify, MapKind::kDct, MapKind::kZigzag,
                                  MapKind::kScale}));
  EXPECT_EQ(maps.decompress.factors.back(), MapKind::kScaleInverse);
}

TEST(ComposeTest, IdentityQuantizationGivesIdentityMap) {
  const JpegMaps maps = ComposeJpeg(8, 8, QuantizationMatrix());
  // Contract J~[x, y, k, h, w] with J[x', y', k', h, w] over pixels.
  const LabeledTensor jt = maps.decompress.tensor;
  const LabeledTensor j =
      maps.compress.tensor.Relabeled({{"x", "x2"}, {"y", "y2"}, {"k", "k2"}});
  const LabeledTensor id = Contract(jt, j, {"x", "y", "k", "x2", "y2", "k2"});
  for (size_t a = 0; a < 64; ++a) {
    for (size_t b = 0; b < 64; ++b) {
      EXPECT_NEAR(id.at(0, 0, a, 0, 0, b), a == b ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(ComposeTest, RoundTripIsExactForAnyQuantization) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const size_t h = 8 * (1 + trial % 3), w = 8 * (1 + (trial / 3) % 3);
    const QuantizationMatrix q =
        trial == 0 ? QualityToMatrix(50, PlaneKind::kLuma) : RandomQ(rng);
    const JpegMaps maps = ComposeJpeg(h, w, q);
    const LabeledTensor img = RandomImage(h, w, rng);
    const LabeledTensor back =
        ApplyDecompress(maps.decompress, ApplyCompress(maps.compress, img));
    EXPECT_LE(MaxAbsDifference(back, img), 1e-8) << h << "x" << w;
  }
}

TEST(ComposeTest, MatchesProceduralPipeline) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const QuantizationMatrix q = RandomQ(rng);
    const JpegMaps maps = ComposeJpeg(16, 24, q);
    const LabeledTensor img = RandomImage(16, 24, rng);
    const LabeledTensor coef = ApplyCompress(maps.compress, img);
    EXPECT_EQ(coef.Labels(), (std::vector<std::string>{"x", "y", "k"}));
    EXPECT_LE(MaxAbsDifference(coef, ProceduralCompress(img, q)), 1e-8);
  }
}

TEST(ComposeTest, RoundingThenDecompressMatchesDecoder) {
  std::mt19937_64 rng(7);
  const QuantizationMatrix q = QualityToMatrix(50, PlaneKind::kLuma);
  const JpegMaps maps = ComposeJpeg(16, 16, q);
  LabeledTensor img = RandomTensor({{"h", 16}, {"w", 16}}, rng, 0, 255);
  LabeledTensor centred = img;
  for (double& v : centred.mutable_data()) v -= 128.0;

  LabeledTensor coef = ApplyCompress(maps.compress, centred);
  for (double& v : coef.mutable_data()) v = std::round(v);
  const LabeledTensor linear = ApplyDecompress(maps.decompress, coef);

  const CoefficientGrid quantized = Quantize(ForwardBlocks(img), q);
  EXPECT_EQ(MaxAbsDifference(coef, quantized.blocks), 0.0);
  LabeledTensor decoded = InverseBlocks(Dequantize(quantized, q));
  for (double& v : decoded.mutable_data()) v -= 128.0;
  EXPECT_LE(MaxAbsDifference(linear, decoded), 1e-6);
}

TEST(ComposeTest, CompressIsLinear) {
  std::mt19937_64 rng(8);
  const JpegMaps maps = ComposeJpeg(16, 16, RandomQ(rng));
  const LabeledTensor a = RandomImage(16, 16, rng);
  const LabeledTensor b = RandomImage(16, 16, rng);
  const double alpha = 0.75, beta = -2.5;
  const LabeledTensor mix =
      Elementwise(Scale(a, alpha), Scale(b, beta), ElementwiseOp::kAdd);
  const LabeledTensor lhs = ApplyCompress(maps.compress, mix);
  const LabeledTensor rhs =
      Elementwise(Scale(ApplyCompress(maps.compress, a), alpha),
                  Scale(ApplyCompress(maps.compress, b), beta), ElementwiseOp::kAdd);
  EXPECT_LE(MaxAbsDifference(lhs, rhs), 1e-10);
}

TEST(ComposeTest, LeadingAxesPassThrough) {
  std::mt19937_64 rng(9);
  const QuantizationMatrix q = RandomQ(rng);
  const JpegMaps maps = ComposeJpeg(8, 16, q);
  const LabeledTensor batch = RandomTensor({{"p", 3}, {"h", 8}, {"w", 16}}, rng);
  const LabeledTensor coef = ApplyCompress(maps.compress, batch);
  EXPECT_EQ(coef.Labels(), (std::vector<std::string>{"p", "x", "y", "k"}));
  const LabeledTensor back = ApplyDecompress(maps.decompress, coef);
  EXPECT_EQ(back.Labels(), (std::vector<std::string>{"p", "h", "w"}));
  EXPECT_LE(MaxAbsDifference(back, batch), 1e-10);
}

TEST(BlockwiseTest, AgreesWithDenseMaps) {
  std::mt19937_64 rng(10);
  const QuantizationMatrix q = RandomQ(rng);
  const JpegMaps maps = ComposeJpeg(24, 16, q);
  const LabeledTensor img = RandomTensor({{"p", 2}, {"h", 24}, {"w", 16}}, rng);
  const LabeledTensor dense = ApplyCompress(maps.compress, img);
  const LabeledTensor blockwise = CompressBlockwise(img, q);
  EXPECT_LE(MaxAbsDifference(dense, blockwise), 1e-10);
  EXPECT_LE(MaxAbsDifference(DecompressBlockwise(blockwise, q),
                             ApplyDecompress(maps.decompress, dense)),
            1e-10);
}

TEST(BlockwiseTest, HandlesImagesBeyondTheDenseLimit) {
  std::mt19937_64 rng(11);
  const QuantizationMatrix q = RandomQ(rng);
  const LabeledTensor img = RandomImage(80, 72, rng);
  EXPECT_LE(MaxAbsDifference(DecompressBlockwise(CompressBlockwise(img, q), q), img),
            1e-8);
  EXPECT_LE(MaxAbsDifference(CompressBlockwise(img, q), ProceduralCompress(img, q)),
            1e-8);
}

TEST(PixelMapTest, GaussianPreservesConstants) {
  LabeledTensor img({{"h", 8}, {"w", 6}});
  for (double& v : img.mutable_data()) v = 42.0;
  const LabeledTensor out = ApplyPixelMap(BuildGaussian3x3Map(8, 6), img);
  for (double v : out.data()) EXPECT_NEAR(v, 42.0, 1e-12);
}

TEST(PixelMapTest, GaussianMatchesDirectStencil) {
  std::mt19937_64 rng(12);
  const LabeledTensor img = RandomTensor({{"h", 7}, {"w", 9}}, rng, 0, 255);
  const LabeledTensor out = ApplyPixelMap(BuildGaussian3x3Map(7, 9), img);
  auto at = [&](long r, long c) {
    r = std::clamp(r, 0L, 6L);
    c = std::clamp(c, 0L, 8L);
    return img.at(r, c);
  };
  for (long r = 0; r < 7; ++r) {
    for (long c = 0; c < 9; ++c) {
      const double want = 0.5 * at(r, c) +
                          0.125 * (at(r - 1, c) + at(r + 1, c) + at(r, c - 1) + at(r, c + 1));
      EXPECT_NEAR(out.at(r, c), want, 1e-12);
    }
  }
}

TEST(PixelMapTest, GrayscaleOfPureRed) {
  LabeledTensor rgb({{"c", 3}, {"h", 1}, {"w", 2}});
  rgb.at(0, 0, 0) = 255.0;
  rgb.at(0, 0, 1) = 10.0;
  rgb.at(1, 0, 1) = 20.0;
  rgb.at(2, 0, 1) = 30.0;
  const LabeledTensor y = ApplyPixelMap(BuildGrayscaleMap(1, 2), rgb);
  EXPECT_NEAR(y.at(0, 0), 76.245, 1e-12);
  EXPECT_NEAR(y.at(0, 1), 0.299 * 10 + 0.587 * 20 + 0.114 * 30, 1e-12);
}

TEST(PixelMapTest, ResamplingFixedPoint) {
  std::mt19937_64 rng(13);
  const LabeledTensor small = RandomTensor({{"h", 4}, {"w", 3}}, rng);
  const LabeledTensor big = ApplyPixelMap(BuildUpsample2Map(4, 3), small);
  ASSERT_EQ(big.Extent("h"), 8u);
  ASSERT_EQ(big.Extent("w"), 6u);
  for (size_t r = 0; r < 8; ++r) {
    for (size_t c = 0; c < 6; ++c) EXPECT_EQ(big.at(r, c), small.at(r / 2, c / 2));
  }
  const LabeledTensor again =
      ApplyPixelMap(BuildUpsample2Map(4, 3), ApplyPixelMap(BuildDownsample2Map(8, 6), big));
  EXPECT_EQ(again.data(), big.data());
  EXPECT_JS_ERROR(BuildDownsample2Map(7, 6), ErrorCode::kInvalidArgument);
}

TEST(PixelMapTest, ConvMapMatchesConv2d) {
  std::mt19937_64 rng(14);
  const LabeledTensor img = RandomTensor({{"h", 9}, {"w", 8}}, rng);
  for (size_t kh : {1u, 3u, 5u}) {
    const LabeledTensor kernel = RandomTensor({{"kh", kh}, {"kw", 3}}, rng);
    const LabeledTensor via_map = ApplyPixelMap(BuildConvMap(kernel, 9, 8), img);
    const LabeledTensor direct =
        Conv2d(LabeledTensor({{"p", 1}, {"h", 9}, {"w", 8}}, img.data()),
               LabeledTensor({{"out", 1}, {"in", 1}, {"kh", kh}, {"kw", 3}},
                             kernel.data()));
    EXPECT_LE(MaxAbsDifference(via_map,
                               LabeledTensor({{"h", 9}, {"w", 8}}, direct.data())),
              1e-12);
  }
  EXPECT_JS_ERROR(BuildConvMap(LabeledTensor({{"kh", 2}, {"kw", 3}}), 8, 8),
                  ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(BuildConvMap(LabeledTensor({{"kh", 11}, {"kw", 3}}), 8, 8),
                  ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace jpegspace
