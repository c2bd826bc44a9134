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

#include "jpegspace/netspec.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "jpegspace/error.h"
#include "jpegspace/parallel.h"

namespace jpegspace {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, "network spec: " + what);
}

// Returns output channels.
size_t CheckConv(const ConvLayer& conv, size_t in_channels) {
  if (conv.weights.Labels() !=
      std::vector<std::string>{"out", "in", "kh", "kw"}) {
    Bad("conv weights must have axes [out, in, kh, kw]");
  }
  if (conv.weights.Extent("in") != in_channels) {
    Bad("conv expects " + std::to_string(conv.weights.Extent("in")) +
        " channels, receives " + std::to_string(in_channels));
  }
  if (conv.weights.Extent("kh") % 2 == 0 || conv.weights.Extent("kw") % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "conv kernel extents must be odd");
  }
  if (!conv.bias.empty() && conv.bias.size() != conv.weights.Extent("out")) {
    Bad("conv bias length differs from output channels");
  }
  if (conv.stride == 0) {
    throw Error(ErrorCode::kInvalidArgument, "conv stride must be >= 1");
  }
  return conv.weights.Extent("out");
}

void CheckBn(const BatchNormLayer& bn, size_t channels) {
  bn.params.Validate();
  if (bn.params.channels() != channels) {
    Bad("batch norm over " + std::to_string(bn.params.channels()) +
        " channels, receives " + std::to_string(channels));
  }
}

std::vector<double> Dense(const FcLayer& fc, const std::vector<double>& x) {
  const size_t out = fc.weights.Extent("out");
  const size_t in = fc.weights.Extent("in");
  std::vector<double> y(out);
  const auto& w = fc.weights.data();
  for (size_t o = 0; o < out; ++o) {
    double s = fc.bias.empty() ? 0.0 : fc.bias[o];
    for (size_t i = 0; i < in; ++i) s += w[o * in + i] * x[i];
    y[o] = s;
  }
  return y;
}

void ReluVector(std::vector<double>& v) {
  for (double& x : v) x = std::max(x, 0.0);
}

LabeledTensor RandomTensor(std::vector<Axis> axes, std::mt19937_64& rng,
                           double lo, double hi) {
  LabeledTensor t(std::move(axes));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : t.mutable_data()) v = dist(rng);
  return t;
}

std::vector<double> RandomVector(size_t n, std::mt19937_64& rng, double lo,
                                 double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

ConvLayer RandomConv(size_t out, size_t in, std::mt19937_64& rng) {
  ConvLayer conv;
  conv.weights =
      RandomTensor({{"out", out}, {"in", in}, {"kh", 3}, {"kw", 3}}, rng, -0.5, 0.5);
  conv.bias = RandomVector(out, rng, -0.5, 0.5);
  return conv;
}

BatchNormLayer RandomBn(size_t channels, std::mt19937_64& rng) {
  BatchNormLayer bn;
  bn.params.gamma = RandomVector(channels, rng, 0.5, 1.5);
  bn.params.beta = RandomVector(channels, rng, -0.5, 0.5);
  bn.params.running_mean = RandomVector(channels, rng, -0.5, 0.5);
  bn.params.running_var = RandomVector(channels, rng, 0.5, 1.5);
  return bn;
}

}  // namespace

void NetworkSpec::Validate() const { (void)OutputSize(); }

size_t NetworkSpec::OutputSize() const {
  if (channels == 0 || height == 0 || width == 0) Bad("empty input shape");
  size_t c = channels;
  size_t features = 0;
  bool pooled = false;
  for (size_t i = 0; i < layers.size(); ++i) {
    std::visit(
        Overloaded{
            [&](const ConvLayer& conv) {
              if (pooled) Bad("convolution after global average pooling");
              c = CheckConv(conv, c);
            },
            [&](const BatchNormLayer& bn) {
              if (pooled) Bad("batch norm after global average pooling");
              CheckBn(bn, c);
            },
            [&](const ReluLayer&) {},
            [&](const ResidualBlock& block) {
              if (pooled) Bad("residual block after global average pooling");
              if (block.conv1.stride != 1 || block.conv2.stride != 1) {
                Bad("residual convolutions must have stride 1");
              }
              const size_t mid = CheckConv(block.conv1, c);
              CheckBn(block.bn1, mid);
              if (CheckConv(block.conv2, mid) != c) {
                Bad("residual block changes the channel count");
              }
              CheckBn(block.bn2, c);
            },
            [&](const GapLayer&) {
              if (pooled) Bad("more than one global average pooling layer");
              pooled = true;
              features = c;
            },
            [&](const FcLayer& fc) {
              if (!pooled) Bad("fully-connected layer before pooling");
              if (fc.weights.Labels() != std::vector<std::string>{"out", "in"}) {
                Bad("fc weights must have axes [out, in]");
              }
              if (fc.weights.Extent("in") != features) {
                Bad("fc expects " + std::to_string(fc.weights.Extent("in")) +
                    " features, receives " + std::to_string(features));
              }
              if (!fc.bias.empty() && fc.bias.size() != fc.weights.Extent("out")) {
                Bad("fc bias length differs from outputs");
              }
              features = fc.weights.Extent("out");
            },
        },
        layers[i]);
  }
  if (!pooled) Bad("missing global average pooling");
  return features;
}

NetworkSpec MakeToyNetwork(size_t channels, size_t classes, size_t height,
                           size_t width, uint64_t seed) {
  std::mt19937_64 rng(seed);
  NetworkSpec spec;
  spec.channels = 1;
  spec.height = height;
  spec.width = width;
  spec.layers.push_back(RandomConv(channels, 1, rng));
  spec.layers.push_back(RandomBn(channels, rng));
  spec.layers.push_back(ReluLayer{});
  for (int b = 0; b < 3; ++b) {
    ResidualBlock block;
    block.conv1 = RandomConv(channels, channels, rng);
    block.bn1 = RandomBn(channels, rng);
    block.conv2 = RandomConv(channels, channels, rng);
    block.bn2 = RandomBn(channels, rng);
    spec.layers.push_back(std::move(block));
    spec.layers.push_back(ReluLayer{});
  }
  spec.layers.push_back(GapLayer{});
  FcLayer fc;
  fc.weights = RandomTensor({{"out", classes}, {"in", channels}}, rng, -0.5, 0.5);
  fc.bias = RandomVector(classes, rng, -0.5, 0.5);
  spec.layers.push_back(std::move(fc));
  spec.Validate();
  return spec;
}

std::vector<double> ForwardPixel(const NetworkSpec& spec,
                                 const LabeledTensor& input) {
  spec.Validate();
  if (input.axes() != std::vector<Axis>{{"p", spec.channels},
                                        {"h", spec.height},
                                        {"w", spec.width}}) {
    Bad("input must be [p, h, w] matching the spec");
  }
  LabeledTensor x = input;
  std::vector<double> v;
  bool pooled = false;
  for (const auto& layer : spec.layers) {
    std::visit(
        Overloaded{
            [&](const ConvLayer& conv) {
              x = Conv2d(x, conv.weights, conv.bias, conv.stride);
            },
            [&](const BatchNormLayer& bn) {
              x = BatchNormPixel(x, bn.params, BnMode::kInference);
            },
            [&](const ReluLayer&) {
              if (pooled) {
                ReluVector(v);
              } else {
                x = ReluPixel(x);
              }
            },
            [&](const ResidualBlock& block) {
              LabeledTensor t = Conv2d(x, block.conv1.weights, block.conv1.bias);
              t = ReluPixel(BatchNormPixel(t, block.bn1.params, BnMode::kInference));
              t = Conv2d(t, block.conv2.weights, block.conv2.bias);
              t = BatchNormPixel(t, block.bn2.params, BnMode::kInference);
              x = Elementwise(x, t, ElementwiseOp::kAdd);
            },
            [&](const GapLayer&) {
              v = GlobalAveragePoolPixel(x);
              pooled = true;
            },
            [&](const FcLayer& fc) { v = Dense(fc, v); },
        },
        layer);
  }
  return v;
}

JpegNetwork ConvertWeights(const NetworkSpec& spec, const QuantizationMatrix& q,
                           ConvBuilder builder) {
  spec.Validate();
  if (spec.height % 8 != 0 || spec.width % 8 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "transform-domain networks need sizes divisible by 8");
  }
  JpegNetwork net;
  net.spec = spec;
  net.q = q;
  const bool dense = builder != ConvBuilder::kFactored &&
                     spec.height <= kMaxExplodedEdge &&
                     spec.width <= kMaxExplodedEdge;
  JpegMaps maps;
  if (dense) maps = ComposeJpeg(spec.height, spec.width, QuantizationMatrix());
  auto convert = [&](const ConvLayer& conv) {
    if (conv.stride != 1) {
      throw Error(ErrorCode::kUnsupportedFeature,
                  "strided convolutions have no exploded form");
    }
    CompressedConv c;
    if (!dense) {
      c = FactoredConv(conv.weights, QuantizationMatrix(), spec.height, spec.width);
    } else if (builder == ConvBuilder::kNaive) {
      c = ExplodeConvNaive(conv.weights, maps);
    } else {
      c = ExplodeConvFast(conv.weights, maps);
    }
    c.bias = conv.bias;
    net.convs.push_back(std::move(c));
  };
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      convert(*conv);
    } else if (const auto* block = std::get_if<ResidualBlock>(&layer)) {
      convert(block->conv1);
      convert(block->conv2);
    }
  }
  return net;
}

std::vector<double> ForwardJpeg(const JpegNetwork& net,
                                const LabeledTensor& coefficients, int m) {
  const NetworkSpec& spec = net.spec;
  if (coefficients.axes() !=
      std::vector<Axis>{{"p", spec.channels},
                        {"x", spec.height / 8},
                        {"y", spec.width / 8},
                        {"k", kBlockArea}}) {
    Bad("coefficients must be [p, x, y, k] matching the spec");
  }
  LabeledTensor f = coefficients;
  {
    auto& d = f.mutable_data();
    for (size_t i = 0; i < d.size(); ++i) d[i] *= net.q.zigzag(i % kBlockArea);
  }
  std::vector<double> v;
  bool pooled = false;
  size_t next_conv = 0;
  for (const auto& layer : spec.layers) {
    std::visit(
        Overloaded{
            [&](const ConvLayer&) { f = net.convs[next_conv++].Apply(f); },
            [&](const BatchNormLayer& bn) {
              f = BnTransform(f, bn.params, BnMode::kInference);
            },
            [&](const ReluLayer&) {
              if (pooled) {
                ReluVector(v);
              } else {
                f = AsmRelu(f, m, ReluVariant::kAsm);
              }
            },
            [&](const ResidualBlock& block) {
              LabeledTensor t = net.convs[next_conv++].Apply(f);
              t = BnTransform(t, block.bn1.params, BnMode::kInference);
              t = AsmRelu(t, m, ReluVariant::kAsm);
              t = net.convs[next_conv++].Apply(t);
              t = BnTransform(t, block.bn2.params, BnMode::kInference);
              f = Elementwise(f, t, ElementwiseOp::kAdd);
            },
            [&](const GapLayer&) {
              v = GapTransform(f);
              pooled = true;
            },
            [&](const FcLayer& fc) { v = Dense(fc, v); },
        },
        layer);
  }
  return v;
}

DeviationReport Deviation(const NetworkSpec& spec,
                          const std::vector<LabeledTensor>& inputs,
                          const QuantizationMatrix& q, int m) {
  return Deviation(spec, ConvertWeights(spec, q), inputs, m);
}

DeviationReport Deviation(const NetworkSpec& spec, const JpegNetwork& net,
                          const std::vector<LabeledTensor>& inputs, int m) {
  if (inputs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "deviation needs >= 1 input");
  }
  std::vector<std::vector<double>> diffs(inputs.size());
  ParallelFor(inputs.size(), [&](size_t i) {
    const auto pixel = ForwardPixel(spec, inputs[i]);
    const auto jpeg =
        ForwardJpeg(net, CompressBlockwise(inputs[i], net.q), m);
    diffs[i].resize(pixel.size());
    for (size_t j = 0; j < pixel.size(); ++j) {
      diffs[i][j] = std::abs(pixel[j] - jpeg[j]);
    }
  });
  DeviationReport report;
  size_t count = 0;
  for (const auto& d : diffs) {
    for (double v : d) {
      report.max_abs = std::max(report.max_abs, v);
      report.mean_abs += v;
      ++count;
    }
  }
  report.mean_abs /= static_cast<double>(std::max<size_t>(count, 1));
  return report;
}

std::vector<LabeledTensor> RandomInputs(const NetworkSpec& spec, size_t count,
                                        uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledTensor> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    out.push_back(RandomTensor(
        {{"p", spec.channels}, {"h", spec.height}, {"w", spec.width}}, rng,
        -1.0, 1.0));
  }
  return out;
}

}  // namespace jpegspace
