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

#include "jpegspace/sidecar.h"

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "test_util.h"

namespace jpegspace {
namespace {

using testing_util::RandomTensor;

Image RandomImage(size_t h, size_t w, size_t c, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(h, w, c);
  for (auto& s : img.samples) s = static_cast<uint8_t>(rng() & 0xFF);
  return img;
}

uint32_t ReadU32(const std::vector<uint8_t>& b, size_t pos) {
  return b[pos] | (b[pos + 1] << 8) | (b[pos + 2] << 16) |
         (static_cast<uint32_t>(b[pos + 3]) << 24);
}

void ExpectSameNetworks(const NetworkSpec& a, const NetworkSpec& b) {
  EXPECT_EQ(a.channels, b.channels);
  EXPECT_EQ(a.height, b.height);
  EXPECT_EQ(a.width, b.width);
  ASSERT_EQ(a.layers.size(), b.layers.size());
  // Forward passes agree bit for bit.
  const LabeledTensor input = RandomInputs(a, 1, 99)[0];
  EXPECT_EQ(ForwardPixel(a, input), ForwardPixel(b, input));
}

TEST(TensorSidecarTest, LayoutOfSmallTensor) {
  const LabeledTensor t({{"ab", 2}}, {1.5, -2.0});
  const auto bytes = SerializeTensor(t);
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JSTN");
  EXPECT_EQ(ReadU32(bytes, 4), kSidecarVersion);
  EXPECT_EQ(ReadU32(bytes, 8), 1u);  // rank
  EXPECT_EQ(ReadU32(bytes, 12), 2u);  // label length
  EXPECT_EQ(bytes[16], 'a');
  EXPECT_EQ(bytes[17], 'b');
  // magic, version, rank, label length, label, extent, data
  EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 4 + 2 + 8 + 2 * 8);
  double last;
  std::memcpy(&last, bytes.data() + bytes.size() - 8, 8);
  EXPECT_EQ(last, -2.0);
}

TEST(TensorSidecarTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  for (const auto& axes : std::vector<std::vector<Axis>>{
           {}, {{"k", 64}}, {{"x", 2}, {"y", 3}, {"k'", 64}}}) {
    LabeledTensor t = axes.empty() ? LabeledTensor::Scalar(3.25) : RandomTensor(axes, rng);
    if (!axes.empty()) t.mutable_data()[0] = -0.0;
    const LabeledTensor back = ParseTensor(SerializeTensor(t));
    EXPECT_EQ(back.axes(), t.axes());
    ASSERT_EQ(back.size(), t.size());
    EXPECT_EQ(std::memcmp(back.data().data(), t.data().data(), 8 * t.size()), 0);
  }
}

TEST(TensorSidecarTest, Errors) {
  const auto bytes = SerializeTensor(LabeledTensor({{"i", 3}}, {1, 2, 3}));
  for (size_t n = 0; n < bytes.size(); ++n) {
    const std::vector<uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    EXPECT_JS_ERROR(ParseTensor(prefix), ErrorCode::kTruncatedStream);
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_JS_ERROR(ParseTensor(bad_magic), ErrorCode::kMalformedStream);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_JS_ERROR(ParseTensor(trailing), ErrorCode::kMalformedStream);
  auto future = bytes;
  future[4] = 2;
  EXPECT_JS_ERROR(ParseTensor(future), ErrorCode::kUnsupportedFeature);
  try {
    ParseTensor(std::vector<uint8_t>(bytes.begin(), bytes.begin() + 10));
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("truncated stream", 0), 0u) << e.what();
  }
}

TEST(CoefficientSidecarTest, RoundTripsEveryMode) {
  for (size_t c : {1u, 3u}) {
    for (Subsampling mode : {Subsampling::k444, Subsampling::k420}) {
      if (c == 1 && mode == Subsampling::k420) continue;
      const JpegData d = Compress(RandomImage(21, 35, c, c), 40, mode);
      const JpegData back = ParseCoefficients(SerializeCoefficients(d));
      EXPECT_EQ(back.height, d.height);
      EXPECT_EQ(back.width, d.width);
      EXPECT_EQ(back.subsampling, d.subsampling);
      EXPECT_EQ(back.quantization, d.quantization);
      ASSERT_EQ(back.components.size(), d.components.size());
      for (size_t p = 0; p < c; ++p) {
        EXPECT_EQ(back.components[p].blocks.axes(), d.components[p].blocks.axes());
        EXPECT_EQ(back.components[p].blocks.data(), d.components[p].blocks.data());
        EXPECT_TRUE(back.components[p].quantized);
      }
      // Decoding either copy gives the same pixels.
      EXPECT_EQ(Decompress(back).samples, Decompress(d).samples);
    }
  }
}

TEST(CoefficientSidecarTest, Errors) {
  const auto bytes = SerializeCoefficients(Compress(RandomImage(8, 8, 1, 2), 75,
                                                    Subsampling::k444));
  for (size_t n = 0; n < bytes.size(); n += 5) {
    const std::vector<uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    EXPECT_JS_ERROR(ParseCoefficients(prefix), ErrorCode::kTruncatedStream);
  }
  auto wrong_kind = SerializeTensor(LabeledTensor({{"i", 1}}));
  EXPECT_JS_ERROR(ParseCoefficients(wrong_kind), ErrorCode::kMalformedStream);
}

TEST(NetworkSidecarTest, ToyNetworkRoundTrips) {
  const NetworkSpec spec = MakeToyNetwork(2, 5, 16, 8, 3);
  ExpectSameNetworks(ParseNetwork(SerializeNetwork(spec)), spec);
}

TEST(NetworkSidecarTest, PreservesStrideAndBesselFlag) {
  NetworkSpec spec = MakeToyNetwork(1, 2, 8, 8, 4);
  for (Layer& l : spec.layers) {
    if (auto* bn = std::get_if<BatchNormLayer>(&l)) {
      bn->params.bessel = true;
      bn->params.epsilon = 1e-3;
    }
  }
  std::get<ConvLayer>(spec.layers[0]).stride = 2;
  const NetworkSpec back = ParseNetwork(SerializeNetwork(spec));
  EXPECT_EQ(std::get<ConvLayer>(back.layers[0]).stride, 2u);
  for (const Layer& l : back.layers) {
    if (const auto* bn = std::get_if<BatchNormLayer>(&l)) {
      EXPECT_TRUE(bn->params.bessel);
      EXPECT_EQ(bn->params.epsilon, 1e-3);
    }
  }
}

TEST(NetworkSidecarTest, Errors) {
  const auto bytes = SerializeNetwork(MakeToyNetwork(1, 2, 8, 8, 5));
  for (size_t n = 0; n < bytes.size(); n += 97) {
    const std::vector<uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    EXPECT_JS_ERROR(ParseNetwork(prefix), ErrorCode::kTruncatedStream);
  }
  auto bad = bytes;
  bad[0] = 'Q';
  EXPECT_JS_ERROR(ParseNetwork(bad), ErrorCode::kMalformedStream);
}

}  // namespace
}  // namespace jpegspace
