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

#include "jpegspace/pixel_ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

const LabeledTensor& CheckFeatures(const LabeledTensor& t) {
  if (t.Labels() != std::vector<std::string>{"p", "h", "w"}) {
    throw Error(ErrorCode::kShapeMismatch, "feature map must have axes [p, h, w]");
  }
  return t;
}

}  // namespace

LabeledTensor Conv2d(const LabeledTensor& input, const LabeledTensor& kernel,
                     std::span<const double> bias, size_t stride) {
  CheckFeatures(input);
  if (kernel.Labels() != std::vector<std::string>{"out", "in", "kh", "kw"}) {
    throw Error(ErrorCode::kShapeMismatch,
                "kernel must have axes [out, in, kh, kw]");
  }
  const size_t cin = input.Extent("p");
  const size_t h = input.Extent("h");
  const size_t w = input.Extent("w");
  const size_t cout = kernel.Extent("out");
  const size_t kh = kernel.Extent("kh");
  const size_t kw = kernel.Extent("kw");
  if (kernel.Extent("in") != cin) {
    throw Error(ErrorCode::kShapeMismatch,
                "kernel expects " + std::to_string(kernel.Extent("in")) +
                    " input channels, got " + std::to_string(cin));
  }
  if (kh % 2 == 0 || kw % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel extents must be odd");
  }
  if (stride == 0) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  if (!bias.empty() && bias.size() != cout) {
    throw Error(ErrorCode::kShapeMismatch, "bias length differs from channels");
  }
  const size_t oh = (h + stride - 1) / stride;
  const size_t ow = (w + stride - 1) / stride;
  LabeledTensor out({{"p", cout}, {"h", oh}, {"w", ow}});
  const long rh = static_cast<long>(kh / 2);
  const long rw = static_cast<long>(kw / 2);
  const auto& in = input.data();
  const auto& k = kernel.data();
  auto& o = out.mutable_data();
  for (size_t co = 0; co < cout; ++co) {
    const double b = bias.empty() ? 0.0 : bias[co];
    for (size_t u = 0; u < oh; ++u) {
      for (size_t v = 0; v < ow; ++v) {
        double s = b;
        for (size_t ci = 0; ci < cin; ++ci) {
          for (size_t a = 0; a < kh; ++a) {
            const long i = static_cast<long>(u * stride + a) - rh;
            if (i < 0 || i >= static_cast<long>(h)) continue;
            for (size_t bb = 0; bb < kw; ++bb) {
              const long j = static_cast<long>(v * stride + bb) - rw;
              if (j < 0 || j >= static_cast<long>(w)) continue;
              s += k[((co * cin + ci) * kh + a) * kw + bb] *
                   in[(ci * h + i) * w + j];
            }
          }
        }
        o[(co * oh + u) * ow + v] = s;
      }
    }
  }
  return out;
}

void BnParams::Validate() const {
  const size_t c = gamma.size();
  if (beta.size() != c || running_mean.size() != c || running_var.size() != c) {
    throw Error(ErrorCode::kInvalidArgument, "batch-norm parameters are ragged");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "batch-norm epsilon must be > 0");
  }
  for (double v : running_var) {
    if (v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "running variance is negative");
    }
  }
}

ChannelStatistics PixelStatistics(const LabeledTensor& input, bool bessel) {
  CheckFeatures(input);
  const size_t c = input.Extent("p");
  const size_t n = input.Extent("h") * input.Extent("w");
  ChannelStatistics stats{std::vector<double>(c), std::vector<double>(c)};
  const auto& d = input.data();
  for (size_t p = 0; p < c; ++p) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += d[p * n + i];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sq += (d[p * n + i] - mean) * (d[p * n + i] - mean);
    }
    stats.mean[p] = mean;
    stats.variance[p] =
        sq / static_cast<double>(bessel && n > 1 ? n - 1 : n);
  }
  return stats;
}

LabeledTensor BatchNormPixel(const LabeledTensor& input, const BnParams& params,
                             BnMode mode) {
  CheckFeatures(input);
  params.Validate();
  const size_t c = input.Extent("p");
  if (params.channels() != c) {
    throw Error(ErrorCode::kShapeMismatch, "batch-norm channel count differs");
  }
  ChannelStatistics stats;
  if (mode == BnMode::kBatchStatistics) {
    stats = PixelStatistics(input, params.bessel);
  } else {
    stats = {params.running_mean, params.running_var};
  }
  const size_t n = input.Extent("h") * input.Extent("w");
  LabeledTensor out = input;
  auto& d = out.mutable_data();
  for (size_t p = 0; p < c; ++p) {
    const double scale = params.gamma[p] / std::sqrt(stats.variance[p] + params.epsilon);
    for (size_t i = 0; i < n; ++i) {
      d[p * n + i] = (d[p * n + i] - stats.mean[p]) * scale + params.beta[p];
    }
  }
  return out;
}

LabeledTensor ReluPixel(const LabeledTensor& input) {
  LabeledTensor out = input;
  for (double& v : out.mutable_data()) v = std::max(v, 0.0);
  return out;
}

std::vector<double> GlobalAveragePoolPixel(const LabeledTensor& input) {
  CheckFeatures(input);
  const size_t c = input.Extent("p");
  const size_t n = input.Extent("h") * input.Extent("w");
  std::vector<double> mean(c, 0.0);
  const auto& d = input.data();
  for (size_t p = 0; p < c; ++p) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += d[p * n + i];
    mean[p] = sum / static_cast<double>(n);
  }
  return mean;
}

}  // namespace jpegspace
