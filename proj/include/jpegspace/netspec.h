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

// A forward-only residual network that runs either on pixels or, after
// weight conversion, on DCT coefficients.

#ifndef JPEGSPACE_NETSPEC_H_
#define JPEGSPACE_NETSPEC_H_

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "jpegspace/jdr_ops.h"
#include "jpegspace/pixel_ops.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

struct ConvLayer {
  LabeledTensor weights;  // [out, in, kh, kw]
  std::vector<double> bias;
  size_t stride = 1;
};

struct BatchNormLayer {
  BnParams params;
};

struct ReluLayer {};

// out = x + bn2(conv2(relu(bn1(conv1(x)))))
struct ResidualBlock {
  ConvLayer conv1;
  BatchNormLayer bn1;
  ConvLayer conv2;
  BatchNormLayer bn2;
};

struct GapLayer {};

struct FcLayer {
  LabeledTensor weights;  // [out, in]
  std::vector<double> bias;
};

using Layer = std::variant<ConvLayer, BatchNormLayer, ReluLayer,
                           ResidualBlock, GapLayer, FcLayer>;

struct NetworkSpec {
  size_t channels = 1;
  size_t height = 0;
  size_t width = 0;
  std::vector<Layer> layers;

  // Channel counts chain, residual blocks preserve shape, exactly one GAP
  // precedes the fully-connected layers and nothing spatial follows it.
  // Throws kShapeMismatch or kInvalidArgument.
  void Validate() const;
  // Width of the final logits.
  size_t OutputSize() const;
};

// Stem conv + BN + ReLU, three residual blocks each followed by a ReLU,
// GAP and one fully-connected layer. Conv weights, FC weights and biases
// are uniform in [-0.5, 0.5]; BN has gamma, running_var in [0.5, 1.5] and
// beta, running_mean in [-0.5, 0.5]. All convolutions are 3x3, stride 1.
NetworkSpec MakeToyNetwork(size_t channels, size_t classes, size_t height,
                           size_t width, uint64_t seed);

// Pixel-domain inference on input[p, h, w]; batch norm uses running
// statistics.
std::vector<double> ForwardPixel(const NetworkSpec& spec,
                                 const LabeledTensor& input);

struct JpegNetwork {
  NetworkSpec spec;
  // Quantisation of the input coefficients.
  QuantizationMatrix q;
  // One per convolution, in layer order (conv1 before conv2 in a block).
  std::vector<CompressedConv> convs;
};

// Every convolution becomes an exploded convolution over unit-quantised
// coefficients; input coefficients are dequantised with `q` on entry.
// Throws kUnsupportedFeature for strided convolutions.
JpegNetwork ConvertWeights(const NetworkSpec& spec, const QuantizationMatrix& q,
                           ConvBuilder builder = ConvBuilder::kFast);

// Transform-domain inference on coefficients[p, x, y, k] scaled by q. ReLU
// layers use ASM with frequency threshold m.
std::vector<double> ForwardJpeg(const JpegNetwork& net,
                                const LabeledTensor& coefficients, int m);

struct DeviationReport {
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

// |pixel logits - jpeg logits| over a batch of pixel inputs [p, h, w]. The
// jpeg input is J_q applied to each image without rounding.
DeviationReport Deviation(const NetworkSpec& spec,
                          const std::vector<LabeledTensor>& inputs,
                          const QuantizationMatrix& q, int m);
// Same, reusing an already converted network.
DeviationReport Deviation(const NetworkSpec& spec, const JpegNetwork& net,
                          const std::vector<LabeledTensor>& inputs, int m);

// Uniform [-1, 1] inputs [p, h, w].
std::vector<LabeledTensor> RandomInputs(const NetworkSpec& spec, size_t count,
                                        uint64_t seed);

}  // namespace jpegspace

#endif  // JPEGSPACE_NETSPEC_H_
