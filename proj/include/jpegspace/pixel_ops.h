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

// Pixel-domain network layers over feature maps [p, h, w]. These are the
// reference the transform-domain operators are checked against.

#ifndef JPEGSPACE_PIXEL_OPS_H_
#define JPEGSPACE_PIXEL_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "jpegspace/tensor.h"

namespace jpegspace {

// Kernels have axes [out, in, kh, kw] with odd kh, kw.
//
// out[o, u, v] = bias[o] + sum_{i,a,b} K[o, i, a, b]
//                              in[i, u*s + a - kh/2, v*s + b - kw/2]
// with zeros outside the image (cross-correlation, "same" padding).
// Output size is ceil(h / s) x ceil(w / s). An empty bias means zero.
LabeledTensor Conv2d(const LabeledTensor& input, const LabeledTensor& kernel,
                     std::span<const double> bias = {}, size_t stride = 1);

struct BnParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;
  // Divide the variance by N - 1 instead of N in batch-statistics mode.
  bool bessel = false;

  size_t channels() const { return gamma.size(); }
  // Throws kInvalidArgument on ragged vectors, epsilon <= 0 or a negative
  // running variance.
  void Validate() const;
};

enum class BnMode { kBatchStatistics, kInference };

struct ChannelStatistics {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Per-channel mean and (biased or Bessel-corrected) variance.
ChannelStatistics PixelStatistics(const LabeledTensor& input, bool bessel);

// y = gamma (x - mean) / sqrt(var + eps) + beta with batch or running
// statistics.
LabeledTensor BatchNormPixel(const LabeledTensor& input, const BnParams& params,
                             BnMode mode);

LabeledTensor ReluPixel(const LabeledTensor& input);

// Mean over (h, w) per channel.
std::vector<double> GlobalAveragePoolPixel(const LabeledTensor& input);

}  // namespace jpegspace

#endif  // JPEGSPACE_PIXEL_OPS_H_
