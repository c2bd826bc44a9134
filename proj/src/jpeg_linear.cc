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

#include <algorithm>
#include <string>

#include "jpegspace/error.h"
#include "jpegspace/harmonic.h"
#include "jpegspace/parallel.h"

namespace jpegspace {

namespace {

void CheckBlockDims(size_t height, size_t width) {
  if (height == 0 || width == 0 || height % kBlockSize != 0 ||
      width % kBlockSize != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "image " + std::to_string(height) + "x" +
                    std::to_string(width) + " is not a multiple of 8");
  }
}

// Labels of `t` other than `drop`, in order.
std::vector<std::string> LeadingLabels(const LabeledTensor& t,
                                       const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const auto& a : t.axes()) {
    if (std::find(drop.begin(), drop.end(), a.label) == drop.end()) {
      out.push_back(a.label);
    }
  }
  return out;
}

std::vector<std::string> Concat(std::vector<std::string> a,
                                const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Per-block map M[k, n] with n = i * 8 + j: D(a, i) D(b, j) scaled by
// `scale[k]`, where (a, b) is zig-zag position k.
std::vector<double> BlockMap(const QuantizationMatrix& q, bool inverse) {
  const auto& d = GetDctBasis(kBlockSize).matrix.data();
  const auto& zz = ZigzagToNatural();
  std::vector<double> m(kBlockArea * kBlockArea);
  for (size_t k = 0; k < kBlockArea; ++k) {
    const size_t a = zz[k] / 8;
    const size_t b = zz[k] % 8;
    const double s = inverse ? q.zigzag(k) : 1.0 / q.zigzag(k);
    for (size_t i = 0; i < 8; ++i) {
      for (size_t j = 0; j < 8; ++j) {
        m[k * kBlockArea + i * 8 + j] = s * d[a * 8 + i] * d[b * 8 + j];
      }
    }
  }
  return m;
}

}  // namespace

const char* MapKindName(MapKind kind) {
  switch (kind) {
    case MapKind::kBlockify: return "B";
    case MapKind::kDct: return "D";
    case MapKind::kZigzag: return "Z";
    case MapKind::kScale: return "S";
    case MapKind::kScaleInverse: return "S~";
    case MapKind::kCompress: return "J";
    case MapKind::kDecompress: return "J~";
  }
  return "?";
}

LinearJpegMap BuildBlockify(size_t height, size_t width) {
  CheckBlockDims(height, width);
  const size_t bx = height / 8;
  const size_t by = width / 8;
  LinearJpegMap map;
  map.kind = MapKind::kBlockify;
  map.height = height;
  map.width = width;
  map.factors = {MapKind::kBlockify};
  map.tensor = LabeledTensor({{"x", bx}, {"y", by}, {"i", 8}, {"j", 8},
                              {"h", height}, {"w", width}});
  for (size_t h = 0; h < height; ++h) {
    for (size_t w = 0; w < width; ++w) {
      map.tensor.at(h / 8, w / 8, h % 8, w % 8, h, w) = 1.0;
    }
  }
  return map;
}

LinearJpegMap BuildDctMap() {
  LinearJpegMap map;
  map.kind = MapKind::kDct;
  map.factors = {MapKind::kDct};
  map.tensor = GetDctBasis(kBlockSize)
                   .forward.Relabeled({{"m", "i"}, {"n", "j"}})
                   .Permuted({"a", "b", "i", "j"});
  return map;
}

LinearJpegMap BuildZigzagMap() {
  LinearJpegMap map;
  map.kind = MapKind::kZigzag;
  map.factors = {MapKind::kZigzag};
  map.tensor = LabeledTensor({{"z", kBlockArea}, {"a", 8}, {"b", 8}});
  const auto& zz = ZigzagToNatural();
  for (size_t z = 0; z < kBlockArea; ++z) {
    map.tensor.at(z, zz[z] / 8, zz[z] % 8) = 1.0;
  }
  return map;
}

LinearJpegMap BuildScaleMap(const QuantizationMatrix& q) {
  LinearJpegMap map;
  map.kind = MapKind::kScale;
  map.factors = {MapKind::kScale};
  map.q = q;
  map.tensor = LabeledTensor({{"k", kBlockArea}, {"z", kBlockArea}});
  for (size_t k = 0; k < kBlockArea; ++k) map.tensor.at(k, k) = 1.0 / q.zigzag(k);
  return map;
}

LinearJpegMap BuildScaleInverseMap(const QuantizationMatrix& q) {
  LinearJpegMap map;
  map.kind = MapKind::kScaleInverse;
  map.factors = {MapKind::kScaleInverse};
  map.q = q;
  map.tensor = LabeledTensor({{"k", kBlockArea}, {"z", kBlockArea}});
  for (size_t k = 0; k < kBlockArea; ++k) map.tensor.at(k, k) = q.zigzag(k);
  return map;
}

JpegMaps ComposeJpeg(size_t height, size_t width, const QuantizationMatrix& q) {
  CheckBlockDims(height, width);
  if (height > kMaxDenseEdge || width > kMaxDenseEdge) {
    throw Error(ErrorCode::kOutOfRange,
                "dense J is limited to " + std::to_string(kMaxDenseEdge) +
                    "x" + std::to_string(kMaxDenseEdge) +
                    "; use the blockwise application");
  }
  const LinearJpegMap b = BuildBlockify(height, width);
  // D then Z: [z, i, j], shared by both directions.
  const LabeledTensor dz =
      Contract(BuildZigzagMap().tensor, BuildDctMap().tensor, {"z", "i", "j"});
  auto compose = [&](const LinearJpegMap& scale, MapKind kind) {
    const LabeledTensor block = Contract(scale.tensor, dz, {"k", "i", "j"});
    LinearJpegMap map;
    map.kind = kind;
    map.height = height;
    map.width = width;
    map.q = q;
    map.factors = {MapKind::kBlockify, MapKind::kDct, MapKind::kZigzag,
                   scale.kind};
    map.tensor = Contract(b.tensor, block, {"x", "y", "k", "h", "w"});
    return map;
  };
  return {compose(BuildScaleMap(q), MapKind::kCompress),
          compose(BuildScaleInverseMap(q), MapKind::kDecompress)};
}

LabeledTensor ApplyCompress(const LinearJpegMap& j, const LabeledTensor& image) {
  const auto lead = LeadingLabels(image, {"h", "w"});
  return Contract(j.tensor, image, Concat(lead, {"x", "y", "k"}));
}

LabeledTensor ApplyDecompress(const LinearJpegMap& j_tilde,
                              const LabeledTensor& coefficients) {
  const auto lead = LeadingLabels(coefficients, {"x", "y", "k"});
  return Contract(j_tilde.tensor, coefficients, Concat(lead, {"h", "w"}));
}

LabeledTensor CompressBlockwise(const LabeledTensor& image,
                                const QuantizationMatrix& q) {
  const auto lead = LeadingLabels(image, {"h", "w"});
  const LabeledTensor src = image.Permuted(Concat(lead, {"h", "w"}));
  const size_t height = src.Extent("h");
  const size_t width = src.Extent("w");
  CheckBlockDims(height, width);
  const size_t bx = height / 8;
  const size_t by = width / 8;
  const size_t planes = src.size() / (height * width);
  std::vector<Axis> axes;
  for (const auto& l : lead) axes.push_back({l, src.Extent(l)});
  for (Axis a : std::vector<Axis>{{"x", bx}, {"y", by}, {"k", kBlockArea}}) {
    axes.push_back(a);
  }
  LabeledTensor out(axes);
  const std::vector<double> m = BlockMap(q, false);
  const auto& in = src.data();
  auto& dst = out.mutable_data();
  ParallelFor(planes * bx, [&](size_t task) {
    const size_t p = task / bx;
    const size_t x = task % bx;
    double block[kBlockArea];
    for (size_t y = 0; y < by; ++y) {
      for (size_t i = 0; i < 8; ++i) {
        for (size_t jj = 0; jj < 8; ++jj) {
          block[i * 8 + jj] =
              in[(p * height + x * 8 + i) * width + y * 8 + jj];
        }
      }
      double* o = &dst[((p * bx + x) * by + y) * kBlockArea];
      for (size_t k = 0; k < kBlockArea; ++k) {
        double s = 0.0;
        for (size_t n = 0; n < kBlockArea; ++n) s += m[k * kBlockArea + n] * block[n];
        o[k] = s;
      }
    }
  });
  return out;
}

LabeledTensor DecompressBlockwise(const LabeledTensor& coefficients,
                                  const QuantizationMatrix& q) {
  const auto lead = LeadingLabels(coefficients, {"x", "y", "k"});
  const LabeledTensor src = coefficients.Permuted(Concat(lead, {"x", "y", "k"}));
  const size_t bx = src.Extent("x");
  const size_t by = src.Extent("y");
  if (src.Extent("k") != kBlockArea) {
    throw Error(ErrorCode::kShapeMismatch, "coefficient axis must be 64 long");
  }
  const size_t height = bx * 8;
  const size_t width = by * 8;
  const size_t planes = src.size() / (bx * by * kBlockArea);
  std::vector<Axis> axes;
  for (const auto& l : lead) axes.push_back({l, src.Extent(l)});
  axes.push_back({"h", height});
  axes.push_back({"w", width});
  LabeledTensor out(axes);
  const std::vector<double> m = BlockMap(q, true);
  const auto& in = src.data();
  auto& dst = out.mutable_data();
  ParallelFor(planes * bx, [&](size_t task) {
    const size_t p = task / bx;
    const size_t x = task % bx;
    double block[kBlockArea];
    for (size_t y = 0; y < by; ++y) {
      const double* c = &in[((p * bx + x) * by + y) * kBlockArea];
      std::fill(block, block + kBlockArea, 0.0);
      for (size_t k = 0; k < kBlockArea; ++k) {
        const double v = c[k];
        if (v == 0.0) continue;
        const double* row = &m[k * kBlockArea];
        for (size_t n = 0; n < kBlockArea; ++n) block[n] += v * row[n];
      }
      for (size_t i = 0; i < 8; ++i) {
        for (size_t jj = 0; jj < 8; ++jj) {
          dst[(p * height + x * 8 + i) * width + y * 8 + jj] = block[i * 8 + jj];
        }
      }
    }
  });
  return out;
}

LabeledTensor BuildGaussian3x3Map(size_t height, size_t width) {
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty image");
  }
  LabeledTensor g({{"u", height}, {"v", width}, {"h", height}, {"w", width}});
  const long hh = static_cast<long>(height);
  const long ww = static_cast<long>(width);
  const struct {
    long di, dj;
    double weight;
  } taps[] = {{0, 0, 0.5},    {-1, 0, 0.125}, {1, 0, 0.125},
              {0, -1, 0.125}, {0, 1, 0.125}};
  for (long u = 0; u < hh; ++u) {
    for (long v = 0; v < ww; ++v) {
      for (const auto& t : taps) {
        const long i = std::clamp(u + t.di, 0L, hh - 1);
        const long j = std::clamp(v + t.dj, 0L, ww - 1);
        g.at(u, v, i, j) += t.weight;
      }
    }
  }
  return g;
}

LabeledTensor BuildGrayscaleMap(size_t height, size_t width) {
  LabeledTensor y({{"u", height}, {"v", width}, {"c", 3}, {"h", height},
                   {"w", width}});
  const double weights[3] = {0.299, 0.587, 0.114};
  for (size_t u = 0; u < height; ++u) {
    for (size_t v = 0; v < width; ++v) {
      for (size_t c = 0; c < 3; ++c) y.at(u, v, c, u, v) = weights[c];
    }
  }
  return y;
}

LabeledTensor BuildDownsample2Map(size_t height, size_t width) {
  if (height % 2 != 0 || width % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "downsampling needs even sizes");
  }
  LabeledTensor d({{"u", height / 2}, {"v", width / 2}, {"h", height},
                   {"w", width}});
  for (size_t u = 0; u < height / 2; ++u) {
    for (size_t v = 0; v < width / 2; ++v) d.at(u, v, 2 * u, 2 * v) = 1.0;
  }
  return d;
}

LabeledTensor BuildUpsample2Map(size_t height, size_t width) {
  LabeledTensor d({{"u", 2 * height}, {"v", 2 * width}, {"h", height},
                   {"w", width}});
  for (size_t u = 0; u < 2 * height; ++u) {
    for (size_t v = 0; v < 2 * width; ++v) d.at(u, v, u / 2, v / 2) = 1.0;
  }
  return d;
}

LabeledTensor BuildConvMap(const LabeledTensor& kernel, size_t height,
                           size_t width) {
  if (kernel.rank() != 2) {
    throw Error(ErrorCode::kShapeMismatch, "kernel must be rank 2");
  }
  const size_t kh = kernel.axes()[0].extent;
  const size_t kw = kernel.axes()[1].extent;
  if (kh % 2 == 0 || kw % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel extents must be odd");
  }
  if (kh > height || kw > width) {
    throw Error(ErrorCode::kInvalidArgument, "kernel larger than the image");
  }
  const long rh = static_cast<long>(kh / 2);
  const long rw = static_cast<long>(kw / 2);
  LabeledTensor c({{"u", height}, {"v", width}, {"h", height}, {"w", width}});
  const auto& kd = kernel.data();
  for (long u = 0; u < static_cast<long>(height); ++u) {
    for (long v = 0; v < static_cast<long>(width); ++v) {
      for (long a = 0; a < static_cast<long>(kh); ++a) {
        const long i = u + a - rh;
        if (i < 0 || i >= static_cast<long>(height)) continue;
        for (long b = 0; b < static_cast<long>(kw); ++b) {
          const long j = v + b - rw;
          if (j < 0 || j >= static_cast<long>(width)) continue;
          c.at(u, v, i, j) = kd[a * kw + b];
        }
      }
    }
  }
  return c;
}

LabeledTensor ApplyPixelMap(const LabeledTensor& map, const LabeledTensor& image) {
  // Axes of the image the map does not consume pass through.
  std::vector<std::string> out = {"u", "v"};
  for (const auto& a : image.axes()) {
    if (!map.HasAxis(a.label)) out.insert(out.end() - 2, a.label);
  }
  return Contract(map, image, out).Relabeled({{"u", "h"}, {"v", "w"}});
}

}  // namespace jpegspace
