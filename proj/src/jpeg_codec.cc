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

#include "jpegspace/jpeg_codec.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jpegspace/error.h"
#include "jpegspace/harmonic.h"
#include "jpegspace/jfif.h"
#include "jpegspace/parallel.h"

namespace jpegspace {

namespace {

constexpr std::array<uint8_t, kBlockArea> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// Annex K example tables, zig-zag order.
constexpr std::array<int, kBlockArea> kBaseLuma = {
    16, 11, 12, 14,  12,  10,  16,  14,  13,  14,  18,  17,  16,  19,  24, 40,
    26, 24, 22, 22,  24,  49,  35,  37,  29,  40,  58,  51,  61,  60,  57, 51,
    56, 55, 64, 72,  92,  78,  64,  68,  87,  69,  55,  56,  80,  109, 81, 87,
    95, 98, 103, 104, 103, 62, 77,  113, 121, 112, 100, 120, 92,  101, 103, 99};
constexpr std::array<int, kBlockArea> kBaseChroma = {
    17, 18, 18, 24, 21, 24, 47, 26, 26, 47, 99, 66, 56, 66, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

constexpr int kMaxDc = 2047;
constexpr int kMaxAc = 1023;

size_t RoundUp(size_t value, size_t multiple) {
  return (value + multiple - 1) / multiple * multiple;
}

double ClampSample(double v) { return std::clamp(std::round(v), 0.0, 255.0); }

LabeledTensor PadPlane(const LabeledTensor& plane, size_t h, size_t w) {
  const size_t ph = plane.Extent("h");
  const size_t pw = plane.Extent("w");
  LabeledTensor out({{"h", h}, {"w", w}});
  for (size_t i = 0; i < h; ++i) {
    const size_t si = std::min(i, ph - 1);
    for (size_t j = 0; j < w; ++j) {
      out.at(i, j) = plane.at(si, std::min(j, pw - 1));
    }
  }
  return out;
}

LabeledTensor CropPlane(const LabeledTensor& plane, size_t h, size_t w) {
  LabeledTensor out({{"h", h}, {"w", w}});
  for (size_t i = 0; i < h; ++i) {
    for (size_t j = 0; j < w; ++j) out.at(i, j) = plane.at(i, j);
  }
  return out;
}

LabeledTensor BoxHalve(const LabeledTensor& plane) {
  const size_t h = plane.Extent("h") / 2;
  const size_t w = plane.Extent("w") / 2;
  LabeledTensor out({{"h", h}, {"w", w}});
  for (size_t i = 0; i < h; ++i) {
    for (size_t j = 0; j < w; ++j) {
      out.at(i, j) = 0.25 * (plane.at(2 * i, 2 * j) + plane.at(2 * i, 2 * j + 1) +
                             plane.at(2 * i + 1, 2 * j) +
                             plane.at(2 * i + 1, 2 * j + 1));
    }
  }
  return out;
}

// Doubles a chroma plane to (h, w). Bilinear uses the centred-sample
// triangle filter (weights 3/4, 1/4) with edge replication.
LabeledTensor UpsampleChroma(const LabeledTensor& chroma, size_t h, size_t w,
                             ChromaUpsampling method) {
  const size_t ch = chroma.Extent("h");
  const size_t cw = chroma.Extent("w");
  LabeledTensor out({{"h", h}, {"w", w}});
  for (size_t i = 0; i < h; ++i) {
    const size_t ci = std::min(i / 2, ch - 1);
    // Neighbour row on the side of the output sample.
    const size_t ni = (i % 2 == 0) ? (ci == 0 ? 0 : ci - 1)
                                   : std::min(ci + 1, ch - 1);
    for (size_t j = 0; j < w; ++j) {
      const size_t cj = std::min(j / 2, cw - 1);
      if (method == ChromaUpsampling::kNearest) {
        out.at(i, j) = chroma.at(ci, cj);
        continue;
      }
      const size_t nj = (j % 2 == 0) ? (cj == 0 ? 0 : cj - 1)
                                     : std::min(cj + 1, cw - 1);
      // Integer samples in, integer samples out; the rounding bias
      // alternates between even (+8) and odd (+7) columns as in libjpeg.
      const double sum = 9.0 * chroma.at(ci, cj) + 3.0 * chroma.at(ni, cj) +
                         3.0 * chroma.at(ci, nj) + chroma.at(ni, nj);
      out.at(i, j) = std::floor((sum + (j % 2 == 0 ? 8.0 : 7.0)) / 16.0);
    }
  }
  return out;
}

void CheckGrid(const CoefficientGrid& grid) {
  const auto& t = grid.blocks;
  if (t.rank() != 3 || t.Labels() != std::vector<std::string>{"x", "y", "k"} ||
      t.Extent("k") != kBlockArea) {
    throw Error(ErrorCode::kShapeMismatch,
                "coefficient grid must have axes [x, y, k=64]");
  }
}

}  // namespace

const std::array<uint8_t, kBlockArea>& ZigzagToNatural() {
  return kZigzagToNatural;
}

const std::array<uint8_t, kBlockArea>& NaturalToZigzag() {
  static const std::array<uint8_t, kBlockArea> inverse = [] {
    std::array<uint8_t, kBlockArea> out{};
    for (size_t k = 0; k < kBlockArea; ++k) {
      out[kZigzagToNatural[k]] = static_cast<uint8_t>(k);
    }
    return out;
  }();
  return inverse;
}

QuantizationMatrix::QuantizationMatrix() { zigzag_.fill(1); }

QuantizationMatrix QuantizationMatrix::FromZigzag(
    const std::array<int, kBlockArea>& q) {
  for (int v : q) {
    if (v < 1 || v > 255) {
      throw Error(ErrorCode::kOutOfRange,
                  "quantisation entry " + std::to_string(v) +
                      " outside [1, 255]");
    }
  }
  QuantizationMatrix m;
  m.zigzag_ = q;
  return m;
}

QuantizationMatrix QuantizationMatrix::FromNatural(
    const std::array<int, kBlockArea>& q) {
  std::array<int, kBlockArea> zz{};
  for (size_t k = 0; k < kBlockArea; ++k) zz[k] = q[kZigzagToNatural[k]];
  return FromZigzag(zz);
}

int QuantizationMatrix::natural(size_t row, size_t col) const {
  return zigzag_[NaturalToZigzag()[row * kBlockSize + col]];
}

std::array<int, kBlockArea> QuantizationMatrix::natural_values() const {
  std::array<int, kBlockArea> out{};
  for (size_t k = 0; k < kBlockArea; ++k) out[kZigzagToNatural[k]] = zigzag_[k];
  return out;
}

QuantizationMatrix QualityToMatrix(int quality, PlaneKind kind) {
  if (quality < 1 || quality > 100) {
    throw Error(ErrorCode::kOutOfRange,
                "quality " + std::to_string(quality) + " outside [1, 100]");
  }
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  const auto& base = kind == PlaneKind::kLuma ? kBaseLuma : kBaseChroma;
  std::array<int, kBlockArea> q{};
  for (size_t k = 0; k < kBlockArea; ++k) {
    q[k] = std::clamp((base[k] * scale + 50) / 100, 1, 255);
  }
  return QuantizationMatrix::FromZigzag(q);
}

PlanarImage RgbToYcbcr(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "image needs 1 or 3 channels");
  }
  PlanarImage out;
  out.height = image.height;
  out.width = image.width;
  const std::vector<Axis> axes = {{"h", image.height}, {"w", image.width}};
  if (image.channels == 1) {
    LabeledTensor y(axes);
    for (size_t i = 0; i < image.samples.size(); ++i) {
      y.mutable_data()[i] = image.samples[i];
    }
    out.planes.push_back(std::move(y));
    return out;
  }
  LabeledTensor y(axes), cb(axes), cr(axes);
  for (size_t i = 0; i < image.height * image.width; ++i) {
    const double r = image.samples[3 * i];
    const double g = image.samples[3 * i + 1];
    const double b = image.samples[3 * i + 2];
    y.mutable_data()[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    cb.mutable_data()[i] = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
    cr.mutable_data()[i] = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
  }
  out.planes = {std::move(y), std::move(cb), std::move(cr)};
  return out;
}

Image YcbcrToRgb(const PlanarImage& image) {
  if (image.planes.size() != 1 && image.planes.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "expected 1 or 3 planes");
  }
  const size_t h = image.planes[0].Extent("h");
  const size_t w = image.planes[0].Extent("w");
  for (const auto& p : image.planes) {
    if (p.Extent("h") != h || p.Extent("w") != w) {
      throw Error(ErrorCode::kShapeMismatch, "planes differ in size");
    }
  }
  Image out(h, w, image.planes.size());
  if (image.planes.size() == 1) {
    for (size_t i = 0; i < h * w; ++i) {
      out.samples[i] =
          static_cast<uint8_t>(ClampSample(image.planes[0].data()[i]));
    }
    return out;
  }
  // 16-bit fixed-point factors with round-half-up, as in the IJG decoder, so
  // 8-bit planes convert to the same samples as the reference libjpeg.
  constexpr int64_t kCrR = 91881, kCbG = 22554, kCrG = 46802, kCbB = 116130;
  constexpr int64_t kHalf = int64_t{1} << 15;
  auto sample = [&](size_t c, size_t i) {
    return static_cast<int64_t>(ClampSample(image.planes[c].data()[i]));
  };
  auto store = [](int64_t v) {
    return static_cast<uint8_t>(std::clamp<int64_t>(v, 0, 255));
  };
  for (size_t i = 0; i < h * w; ++i) {
    const int64_t y = sample(0, i);
    const int64_t cb = sample(1, i) - 128;
    const int64_t cr = sample(2, i) - 128;
    out.samples[3 * i] = store(y + ((kCrR * cr + kHalf) >> 16));
    out.samples[3 * i + 1] = store(y + ((-kCbG * cb - kCrG * cr + kHalf) >> 16));
    out.samples[3 * i + 2] = store(y + ((kCbB * cb + kHalf) >> 16));
  }
  return out;
}

size_t McuSize(Subsampling mode, size_t plane_count) {
  return (mode == Subsampling::k420 && plane_count == 3) ? 16 : 8;
}

PlanarImage PadAndSubsample(const PlanarImage& image, Subsampling mode) {
  if (image.planes.empty() || image.height == 0 || image.width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty image");
  }
  const size_t mcu = McuSize(mode, image.planes.size());
  const size_t h = RoundUp(image.height, mcu);
  const size_t w = RoundUp(image.width, mcu);
  PlanarImage out;
  out.height = image.height;
  out.width = image.width;
  out.subsampling = image.planes.size() == 3 ? mode : Subsampling::k444;
  for (size_t p = 0; p < image.planes.size(); ++p) {
    LabeledTensor padded = PadPlane(image.planes[p], h, w);
    if (p > 0 && out.subsampling == Subsampling::k420) {
      padded = BoxHalve(padded);
    }
    out.planes.push_back(std::move(padded));
  }
  return out;
}

CoefficientGrid ForwardBlocks(const LabeledTensor& plane, size_t plane_id) {
  if (plane.rank() != 2 || !plane.HasAxis("h") || !plane.HasAxis("w")) {
    throw Error(ErrorCode::kShapeMismatch, "plane must have axes [h, w]");
  }
  const LabeledTensor p = plane.Permuted({"h", "w"});
  const size_t h = p.Extent("h");
  const size_t w = p.Extent("w");
  if (h % kBlockSize != 0 || w % kBlockSize != 0 || h == 0 || w == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "plane " + std::to_string(h) + "x" + std::to_string(w) +
                    " is not a multiple of 8");
  }
  const size_t bx = h / kBlockSize;
  const size_t by = w / kBlockSize;
  CoefficientGrid grid;
  grid.plane = plane_id;
  grid.blocks = LabeledTensor({{"x", bx}, {"y", by}, {"k", kBlockArea}});
  const auto& d = GetDctBasis(kBlockSize).matrix.data();
  const auto& zz = NaturalToZigzag();
  auto& out = grid.blocks.mutable_data();
  ParallelFor(bx, [&](size_t x) {
    double block[kBlockArea];
    double rows[kBlockArea];
    for (size_t y = 0; y < by; ++y) {
      for (size_t m = 0; m < kBlockSize; ++m) {
        for (size_t n = 0; n < kBlockSize; ++n) {
          block[m * 8 + n] = p.at(x * 8 + m, y * 8 + n) - 128.0;
        }
      }
      // rows[a, n] = sum_m D[a, m] block[m, n]
      for (size_t a = 0; a < 8; ++a) {
        for (size_t n = 0; n < 8; ++n) {
          double s = 0.0;
          for (size_t m = 0; m < 8; ++m) s += d[a * 8 + m] * block[m * 8 + n];
          rows[a * 8 + n] = s;
        }
      }
      double* dst = &out[(x * by + y) * kBlockArea];
      for (size_t a = 0; a < 8; ++a) {
        for (size_t b = 0; b < 8; ++b) {
          double s = 0.0;
          for (size_t n = 0; n < 8; ++n) s += rows[a * 8 + n] * d[b * 8 + n];
          dst[zz[a * 8 + b]] = s;
        }
      }
    }
  });
  return grid;
}

LabeledTensor InverseBlocks(const CoefficientGrid& grid) {
  CheckGrid(grid);
  const size_t bx = grid.block_rows();
  const size_t by = grid.block_cols();
  LabeledTensor plane({{"h", bx * 8}, {"w", by * 8}});
  const auto& d = GetDctBasis(kBlockSize).matrix.data();
  const auto& src = grid.blocks.data();
  ParallelFor(bx, [&](size_t x) {
    double coef[kBlockArea];
    double cols[kBlockArea];
    for (size_t y = 0; y < by; ++y) {
      const double* c = &src[(x * by + y) * kBlockArea];
      for (size_t k = 0; k < kBlockArea; ++k) coef[kZigzagToNatural[k]] = c[k];
      // cols[m, b] = sum_a D[a, m] coef[a, b]
      for (size_t m = 0; m < 8; ++m) {
        for (size_t b = 0; b < 8; ++b) {
          double s = 0.0;
          for (size_t a = 0; a < 8; ++a) s += d[a * 8 + m] * coef[a * 8 + b];
          cols[m * 8 + b] = s;
        }
      }
      for (size_t m = 0; m < 8; ++m) {
        for (size_t n = 0; n < 8; ++n) {
          double s = 0.0;
          for (size_t b = 0; b < 8; ++b) s += cols[m * 8 + b] * d[b * 8 + n];
          plane.at(x * 8 + m, y * 8 + n) = s + 128.0;
        }
      }
    }
  });
  return plane;
}

namespace {

constexpr int kConstBits = 13;
constexpr int kPass1Bits = 2;
constexpr int64_t kFix0298 = 2446, kFix0390 = 3196, kFix0541 = 4433,
                  kFix0765 = 6270, kFix0899 = 7373, kFix1175 = 9633,
                  kFix1501 = 12299, kFix1847 = 15137, kFix1961 = 16069,
                  kFix2053 = 16819, kFix2562 = 20995, kFix3072 = 25172;

int64_t Descale(int64_t x, int n) { return (x + (int64_t{1} << (n - 1))) >> n; }

// One 8-point butterfly over in[0], in[stride], ...; out holds the undescaled
// even/odd sums in natural order.
void IslowButterfly(const int64_t* in, size_t stride, int64_t out[8]) {
  int64_t z2 = in[2 * stride], z3 = in[6 * stride];
  int64_t z1 = (z2 + z3) * kFix0541;
  const int64_t t2 = z1 - z3 * kFix1847;
  const int64_t t3 = z1 + z2 * kFix0765;
  const int64_t t0 = (in[0] + in[4 * stride]) << kConstBits;
  const int64_t t1 = (in[0] - in[4 * stride]) << kConstBits;
  const int64_t e10 = t0 + t3, e13 = t0 - t3, e11 = t1 + t2, e12 = t1 - t2;

  int64_t o0 = in[7 * stride], o1 = in[5 * stride], o2 = in[3 * stride],
          o3 = in[stride];
  z1 = o0 + o3;
  z2 = o1 + o2;
  z3 = o0 + o2;
  int64_t z4 = o1 + o3;
  const int64_t z5 = (z3 + z4) * kFix1175;
  o0 *= kFix0298;
  o1 *= kFix2053;
  o2 *= kFix3072;
  o3 *= kFix1501;
  z1 *= -kFix0899;
  z2 *= -kFix2562;
  z3 = z3 * -kFix1961 + z5;
  z4 = z4 * -kFix0390 + z5;
  o0 += z1 + z3;
  o1 += z2 + z4;
  o2 += z2 + z3;
  o3 += z1 + z4;

  out[0] = e10 + o3;
  out[7] = e10 - o3;
  out[1] = e11 + o2;
  out[6] = e11 - o2;
  out[2] = e12 + o1;
  out[5] = e12 - o1;
  out[3] = e13 + o0;
  out[4] = e13 - o0;
}

}  // namespace

LabeledTensor InverseBlocksInteger(const CoefficientGrid& grid) {
  CheckGrid(grid);
  const size_t bx = grid.block_rows();
  const size_t by = grid.block_cols();
  LabeledTensor plane({{"h", bx * 8}, {"w", by * 8}});
  const auto& src = grid.blocks.data();
  ParallelFor(bx, [&](size_t x) {
    int64_t coef[kBlockArea];
    int64_t work[kBlockArea];
    int64_t v[8];
    for (size_t y = 0; y < by; ++y) {
      const double* c = &src[(x * by + y) * kBlockArea];
      for (size_t k = 0; k < kBlockArea; ++k) {
        coef[kZigzagToNatural[k]] = static_cast<int64_t>(std::llround(c[k]));
      }
      // Columns first; the descale keeps kPass1Bits of extra precision.
      for (size_t col = 0; col < 8; ++col) {
        IslowButterfly(coef + col, 8, v);
        for (size_t r = 0; r < 8; ++r) {
          work[r * 8 + col] = Descale(v[r], kConstBits - kPass1Bits);
        }
      }
      for (size_t row = 0; row < 8; ++row) {
        IslowButterfly(work + row * 8, 1, v);
        for (size_t n = 0; n < 8; ++n) {
          const int64_t s = Descale(v[n], kConstBits + kPass1Bits + 3) + 128;
          plane.at(x * 8 + row, y * 8 + n) =
              static_cast<double>(std::clamp<int64_t>(s, 0, 255));
        }
      }
    }
  });
  return plane;
}

CoefficientGrid Quantize(const CoefficientGrid& grid,
                         const QuantizationMatrix& q) {
  CheckGrid(grid);
  CoefficientGrid out = grid;
  out.quantized = true;
  auto& data = out.blocks.mutable_data();
  for (size_t i = 0; i < data.size(); ++i) {
    const size_t k = i % kBlockArea;
    const double limit = k == 0 ? kMaxDc : kMaxAc;
    data[i] = std::clamp(std::round(data[i] / q.zigzag(k)), -limit, limit);
  }
  return out;
}

CoefficientGrid Dequantize(const CoefficientGrid& grid,
                           const QuantizationMatrix& q) {
  CheckGrid(grid);
  CoefficientGrid out = grid;
  out.quantized = false;
  auto& data = out.blocks.mutable_data();
  for (size_t i = 0; i < data.size(); ++i) data[i] *= q.zigzag(i % kBlockArea);
  return out;
}

std::vector<RunValue> RleEncode(std::span<const int> block) {
  if (block.size() != kBlockArea) {
    throw Error(ErrorCode::kShapeMismatch, "RLE expects 64 coefficients");
  }
  std::vector<RunValue> out;
  int run = 0;
  for (int v : block) {
    if (v == 0) {
      ++run;
    } else {
      out.push_back({run, v});
      run = 0;
    }
  }
  out.push_back({0, 0});
  return out;
}

std::array<int, kBlockArea> RleDecode(std::span<const RunValue> pairs) {
  std::array<int, kBlockArea> out{};
  size_t pos = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const RunValue& p = pairs[i];
    if (p.is_end_of_block()) {
      if (i + 1 != pairs.size()) {
        throw Error(ErrorCode::kMalformedStream, "RLE data after end-of-block");
      }
      return out;
    }
    if (p.run < 0 || p.value == 0) {
      throw Error(ErrorCode::kMalformedStream, "RLE pair has zero value");
    }
    pos += static_cast<size_t>(p.run);
    if (pos >= kBlockArea) {
      throw Error(ErrorCode::kMalformedStream, "RLE run overflows the block");
    }
    out[pos++] = p.value;
  }
  throw Error(ErrorCode::kMalformedStream, "RLE block lacks end-of-block");
}

JpegData Compress(const Image& image, int quality, Subsampling mode) {
  const PlanarImage planes = PadAndSubsample(RgbToYcbcr(image), mode);
  JpegData data;
  data.height = image.height;
  data.width = image.width;
  data.subsampling = planes.subsampling;
  for (size_t p = 0; p < planes.planes.size(); ++p) {
    const QuantizationMatrix q =
        QualityToMatrix(quality, p == 0 ? PlaneKind::kLuma : PlaneKind::kChroma);
    data.components.push_back(Quantize(ForwardBlocks(planes.planes[p], p), q));
    data.quantization.push_back(q);
  }
  return data;
}

Image Decompress(const JpegData& data, ChromaUpsampling upsampling) {
  if (data.components.size() != data.quantization.size() ||
      (data.components.size() != 1 && data.components.size() != 3)) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected 1 or 3 components with one table each");
  }
  PlanarImage planes;
  planes.height = data.height;
  planes.width = data.width;
  for (size_t p = 0; p < data.components.size(); ++p) {
    // Component samples have 8-bit precision.
    LabeledTensor plane = InverseBlocksInteger(
        Dequantize(data.components[p], data.quantization[p]));
    if (p > 0 && data.subsampling == Subsampling::k420) {
      plane = CropPlane(plane, (data.height + 1) / 2, (data.width + 1) / 2);
      plane = UpsampleChroma(plane, data.height, data.width, upsampling);
    } else {
      plane = CropPlane(plane, data.height, data.width);
    }
    planes.planes.push_back(std::move(plane));
  }
  return YcbcrToRgb(planes);
}

std::vector<uint8_t> Encode(const Image& image, int quality,
                            Subsampling mode) {
  return JfifSerialize(Compress(image, quality, mode));
}

Image Decode(std::span<const uint8_t> stream, ChromaUpsampling upsampling) {
  return Decompress(JfifParse(stream), upsampling);
}

double Psnr(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw Error(ErrorCode::kShapeMismatch, "PSNR needs equal image shapes");
  }
  double sse = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    const double diff = static_cast<double>(a.samples[i]) - b.samples[i];
    sse += diff * diff;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.samples.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace jpegspace
