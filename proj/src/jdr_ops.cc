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

#include "jpegspace/jdr_ops.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "jpegspace/error.h"
#include "jpegspace/harmonic.h"
#include "jpegspace/parallel.h"

namespace jpegspace {

namespace {

const std::vector<std::string> kGridAxes = {"p", "x", "y", "k"};

void CheckKernel(const LabeledTensor& kernel) {
  if (kernel.Labels() != std::vector<std::string>{"out", "in", "kh", "kw"}) {
    throw Error(ErrorCode::kShapeMismatch,
                "kernel must have axes [out, in, kh, kw]");
  }
  if (kernel.Extent("kh") % 2 == 0 || kernel.Extent("kw") % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel extents must be odd");
  }
}

void CheckMaps(const JpegMaps& maps) {
  if (maps.compress.kind != MapKind::kCompress ||
      maps.decompress.kind != MapKind::kDecompress ||
      maps.compress.height != maps.decompress.height ||
      maps.compress.width != maps.decompress.width) {
    throw Error(ErrorCode::kInvalidArgument, "expected a matching J / J~ pair");
  }
  if (maps.compress.height > kMaxExplodedEdge ||
      maps.compress.width > kMaxExplodedEdge) {
    throw Error(ErrorCode::kOutOfRange,
                "exploded convolutions are materialised up to " +
                    std::to_string(kMaxExplodedEdge) + "x" +
                    std::to_string(kMaxExplodedEdge));
  }
}

CompressedConv Skeleton(const LabeledTensor& kernel, const JpegMaps& maps,
                        ConvBuilder builder) {
  CompressedConv conv;
  conv.kernel = kernel;
  conv.q = maps.compress.q;
  conv.height = maps.compress.height;
  conv.width = maps.compress.width;
  conv.built_by = builder;
  return conv;
}

std::vector<std::string> WithoutLabel(const LabeledTensor& t,
                                      const std::string& label) {
  std::vector<std::string> out;
  for (const auto& a : t.axes()) {
    if (a.label != label) out.push_back(a.label);
  }
  return out;
}

// Basis images of the 8x8 DCT, natural frequency order: basis[f][pixel].
const std::array<std::array<double, kBlockArea>, kBlockArea>& BasisImages() {
  static const auto images = [] {
    std::array<std::array<double, kBlockArea>, kBlockArea> out{};
    const auto& d = GetDctBasis(kBlockSize).matrix.data();
    for (size_t a = 0; a < 8; ++a) {
      for (size_t b = 0; b < 8; ++b) {
        for (size_t i = 0; i < 8; ++i) {
          for (size_t j = 0; j < 8; ++j) {
            out[a * 8 + b][i * 8 + j] = d[a * 8 + i] * d[b * 8 + j];
          }
        }
      }
    }
    return out;
  }();
  return images;
}

void CheckFrequency(int m) {
  if (m < 0 || m > kMaxReluFrequency) {
    throw Error(ErrorCode::kOutOfRange,
                "frequency threshold m=" + std::to_string(m) +
                    " outside [0, 14]");
  }
}

}  // namespace

LabeledTensor CompressedConv::Apply(const LabeledTensor& f) const {
  const size_t cout = kernel.Extent("out");
  if (built_by == ConvBuilder::kFactored) {
    if (f.Labels() != kGridAxes) {
      throw Error(ErrorCode::kShapeMismatch,
                  "factored convolution expects [p, x, y, k]");
    }
    const LabeledTensor pixels = DecompressBlockwise(f, q);
    return CompressBlockwise(Conv2d(pixels, kernel, bias, 1), q);
  }
  std::vector<std::string> out;
  for (const auto& a : f.axes()) {
    if (a.label != "p" && a.label != "x" && a.label != "y" && a.label != "k") {
      out.push_back(a.label);
    }
  }
  for (const char* l : {"p'", "x'", "y'", "k'"}) out.push_back(l);
  LabeledTensor result = Contract(xi, f, out).Relabeled(
      {{"p'", "p"}, {"x'", "x"}, {"y'", "y"}, {"k'", "k"}});
  if (!bias.empty()) {
    // A constant b adds 8 b to every DC term, scaled like any coefficient.
    const auto labels = result.Labels();
    const size_t kpos = result.AxisIndex("k");
    const size_t ppos = result.AxisIndex("p");
    const auto strides = result.Strides();
    auto& d = result.mutable_data();
    if (kpos + 1 != labels.size()) {
      throw Error(ErrorCode::kShapeMismatch, "coefficient axis must be last");
    }
    for (size_t i = 0; i < d.size(); i += kBlockArea) {
      const size_t p = (i / strides[ppos]) % cout;
      d[i] += 8.0 * bias[p] / q.zigzag(0);
    }
  }
  return result;
}

CompressedConv ExplodeConvNaive(const LabeledTensor& kernel,
                                const JpegMaps& maps) {
  CheckKernel(kernel);
  CheckMaps(maps);
  const size_t h = maps.compress.height;
  const size_t w = maps.compress.width;
  const size_t cout = kernel.Extent("out");
  const size_t cin = kernel.Extent("in");
  const size_t kh = kernel.Extent("kh");
  const size_t kw = kernel.Extent("kw");
  // C[p', h', w', p, h, w]
  LabeledTensor c({{"p'", cout}, {"h'", h}, {"w'", w}, {"p", cin}, {"h", h},
                   {"w", w}});
  const size_t plane = h * w;
  for (size_t o = 0; o < cout; ++o) {
    for (size_t i = 0; i < cin; ++i) {
      LabeledTensor slice({{"kh", kh}, {"kw", kw}});
      std::copy_n(kernel.data().begin() + (o * cin + i) * kh * kw, kh * kw,
                  slice.mutable_data().begin());
      const LabeledTensor map = BuildConvMap(slice, h, w);  // [u, v, h, w]
      auto& dst = c.mutable_data();
      for (size_t uv = 0; uv < plane; ++uv) {
        std::copy_n(map.data().begin() + uv * plane, plane,
                    dst.begin() + ((o * plane + uv) * cin + i) * plane);
      }
    }
  }
  const LabeledTensor j_out = maps.compress.tensor.Relabeled(
      {{"x", "x'"}, {"y", "y'"}, {"k", "k'"}, {"h", "h'"}, {"w", "w'"}});
  const LabeledTensor jc =
      Contract(j_out, c, {"p'", "x'", "y'", "k'", "p", "h", "w"});
  CompressedConv conv = Skeleton(kernel, maps, ConvBuilder::kNaive);
  conv.xi = Contract(jc, maps.decompress.tensor,
                     {"p'", "x'", "y'", "k'", "p", "x", "y", "k"});
  return conv;
}

CompressedConv ExplodeConvFast(const LabeledTensor& kernel,
                               const JpegMaps& maps) {
  CheckKernel(kernel);
  CheckMaps(maps);
  const size_t h = maps.compress.height;
  const size_t w = maps.compress.width;
  const size_t bx = h / 8;
  const size_t by = w / 8;
  const size_t cout = kernel.Extent("out");
  const size_t cin = kernel.Extent("in");
  const size_t kh = kernel.Extent("kh");
  const size_t kw = kernel.Extent("kw");
  const long rh = static_cast<long>(kh / 2);
  const long rw = static_cast<long>(kw / 2);

  // J~ with (x, y, k) folded into n: one basis image per n.
  const LabeledTensor basis =
      ReshapeFold(maps.decompress.tensor, {{"n", {"x", "y", "k"}}});
  const size_t n_count = basis.Extent("n");
  const size_t plane = h * w;

  // Convolve every basis image with every kernel slice: C^[p', p, n, h, w].
  LabeledTensor convolved(
      {{"p'", cout}, {"p", cin}, {"n", n_count}, {"h", h}, {"w", w}});
  auto& cd = convolved.mutable_data();
  const auto& bd = basis.data();
  const auto& kd = kernel.data();
  ParallelFor(cout * cin, [&](size_t pair) {
    const double* kslice = &kd[pair * kh * kw];
    for (size_t n = 0; n < n_count; ++n) {
      const double* src = &bd[n * plane];
      double* dst = &cd[(pair * n_count + n) * plane];
      for (long u = 0; u < static_cast<long>(h); ++u) {
        for (long v = 0; v < static_cast<long>(w); ++v) {
          double s = 0.0;
          for (long a = 0; a < static_cast<long>(kh); ++a) {
            const long i = u + a - rh;
            if (i < 0 || i >= static_cast<long>(h)) continue;
            for (long b = 0; b < static_cast<long>(kw); ++b) {
              const long j = v + b - rw;
              if (j < 0 || j >= static_cast<long>(w)) continue;
              s += kslice[a * kw + b] * src[i * w + j];
            }
          }
          dst[u * w + v] = s;
        }
      }
    }
  });

  // J is block diagonal: B is a pure reshape of (h, w) into (x', i, y', j),
  // so contracting with J means contracting each block with J's block
  // factor, read off block (0, 0).
  LabeledTensor block({{"k'", kBlockArea}, {"i", 8}, {"j", 8}});
  for (size_t k = 0; k < kBlockArea; ++k) {
    for (size_t i = 0; i < 8; ++i) {
      for (size_t j = 0; j < 8; ++j) {
        block.at(k, i, j) = maps.compress.tensor.at(0, 0, k, i, j);
      }
    }
  }
  LabeledTensor unfolded =
      ReshapeUnfold(convolved, "h", {{"x'", bx}, {"i", 8}});
  unfolded = ReshapeUnfold(unfolded, "w", {{"y'", by}, {"j", 8}});
  const LabeledTensor xi_n =
      Contract(unfolded, block, {"p'", "x'", "y'", "k'", "p", "n"});

  CompressedConv conv = Skeleton(kernel, maps, ConvBuilder::kFast);
  conv.xi = ReshapeUnfold(xi_n, "n", {{"x", bx}, {"y", by}, {"k", kBlockArea}});
  return conv;
}

CompressedConv FactoredConv(const LabeledTensor& kernel,
                            const QuantizationMatrix& q, size_t height,
                            size_t width) {
  CheckKernel(kernel);
  if (height % 8 != 0 || width % 8 != 0 || height == 0 || width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be a multiple of 8");
  }
  CompressedConv conv;
  conv.kernel = kernel;
  conv.q = q;
  conv.height = height;
  conv.width = width;
  conv.built_by = ConvBuilder::kFactored;
  return conv;
}

const MaskMap& GetMaskMap() {
  static const MaskMap map = [] {
    MaskMap m;
    m.psi = LabeledTensor(
        {{"k", kBlockArea}, {"m", 8}, {"n", 8}, {"k'", kBlockArea}});
    const auto& zz = ZigzagToNatural();
    const auto& basis = BasisImages();
    auto& d = m.psi.mutable_data();
    for (size_t k = 0; k < kBlockArea; ++k) {
      for (size_t px = 0; px < kBlockArea; ++px) {
        for (size_t k2 = 0; k2 < kBlockArea; ++k2) {
          d[(k * kBlockArea + px) * kBlockArea + k2] =
              basis[zz[k]][px] * basis[zz[k2]][px];
        }
      }
    }
    return m;
  }();
  return map;
}

LabeledTensor ApplyMask(const MaskMap& map, const LabeledTensor& f,
                        const LabeledTensor& mask) {
  std::vector<std::string> lead = WithoutLabel(f, "k");
  std::vector<std::string> outer = lead;
  for (const char* l : {"k", "m", "n"}) outer.push_back(l);
  const LabeledTensor product = Contract(f, mask, outer);
  lead.push_back("k'");
  return Contract(product, map.psi, lead).Relabeled("k'", "k");
}

size_t FrequencyCount(int m) {
  CheckFrequency(m);
  size_t count = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) count += (i + j <= m) ? 1 : 0;
  }
  return count;
}

LabeledTensor AsmRelu(const LabeledTensor& f, int m, ReluVariant variant,
                      const MaskMap& psi) {
  CheckFrequency(m);
  if (f.rank() == 0 || f.axes().back().label != "k" ||
      f.axes().back().extent != kBlockArea) {
    throw Error(ErrorCode::kShapeMismatch,
                "coefficients must end with a 64-long k axis");
  }
  const size_t blocks = f.size() / kBlockArea;
  const auto& zz = ZigzagToNatural();
  const auto& basis = BasisImages();
  const auto& nz = NaturalToZigzag();
  std::vector<size_t> kept;  // zig-zag indices with i + j <= m
  for (size_t k = 0; k < kBlockArea; ++k) {
    if (static_cast<int>(zz[k] / 8 + zz[k] % 8) <= m) kept.push_back(k);
  }
  auto partial = [&](const double* c, double* out) {
    std::fill(out, out + kBlockArea, 0.0);
    for (size_t k : kept) {
      const double v = c[k];
      const auto& img = basis[zz[k]];
      for (size_t px = 0; px < kBlockArea; ++px) out[px] += v * img[px];
    }
  };

  if (variant == ReluVariant::kNaive) {
    LabeledTensor out = f;
    auto& d = out.mutable_data();
    ParallelFor(blocks, [&](size_t blk) {
      double p[kBlockArea];
      partial(&f.data()[blk * kBlockArea], p);
      for (double& v : p) v = std::max(v, 0.0);
      for (size_t nat = 0; nat < kBlockArea; ++nat) {
        const auto& img = basis[nat];
        double s = 0.0;
        for (size_t px = 0; px < kBlockArea; ++px) s += img[px] * p[px];
        d[blk * kBlockArea + nz[nat]] = s;
      }
    });
    return out;
  }

  std::vector<Axis> mask_axes(f.axes().begin(), f.axes().end() - 1);
  mask_axes.push_back({"m", 8});
  mask_axes.push_back({"n", 8});
  LabeledTensor mask(mask_axes);
  auto& md = mask.mutable_data();
  ParallelFor(blocks, [&](size_t blk) {
    double p[kBlockArea];
    partial(&f.data()[blk * kBlockArea], p);
    for (size_t px = 0; px < kBlockArea; ++px) {
      md[blk * kBlockArea + px] = p[px] >= 0.0 ? 1.0 : 0.0;
    }
  });
  return ApplyMask(psi, f, mask);
}

ChannelStatistics CoefficientStatistics(const LabeledTensor& f, bool bessel) {
  if (f.Labels() != kGridAxes || f.Extent("k") != kBlockArea) {
    throw Error(ErrorCode::kShapeMismatch, "expected a [p, x, y, k] grid");
  }
  const size_t c = f.Extent("p");
  const size_t blocks = f.Extent("x") * f.Extent("y");
  const size_t samples = blocks * kBlockArea;
  ChannelStatistics stats{std::vector<double>(c), std::vector<double>(c)};
  const auto& d = f.data();
  for (size_t p = 0; p < c; ++p) {
    const double* base = &d[p * samples];
    double dc = 0.0;
    for (size_t b = 0; b < blocks; ++b) dc += base[b * kBlockArea];
    const double mean = dc / (8.0 * static_cast<double>(blocks));
    double sq = 0.0;
    for (size_t b = 0; b < blocks; ++b) {
      const double* blk = &base[b * kBlockArea];
      const double centred = blk[0] - 8.0 * mean;
      sq += centred * centred;
      for (size_t k = 1; k < kBlockArea; ++k) sq += blk[k] * blk[k];
    }
    stats.mean[p] = mean;
    stats.variance[p] =
        sq / static_cast<double>(bessel && samples > 1 ? samples - 1 : samples);
  }
  return stats;
}

LabeledTensor BnTransform(const LabeledTensor& f, const BnParams& params,
                          BnMode mode) {
  params.Validate();
  if (f.Labels() != kGridAxes) {
    throw Error(ErrorCode::kShapeMismatch, "expected a [p, x, y, k] grid");
  }
  const size_t c = f.Extent("p");
  if (params.channels() != c) {
    throw Error(ErrorCode::kShapeMismatch, "batch-norm channel count differs");
  }
  const ChannelStatistics stats =
      mode == BnMode::kBatchStatistics
          ? CoefficientStatistics(f, params.bessel)
          : ChannelStatistics{params.running_mean, params.running_var};
  const size_t samples = f.Extent("x") * f.Extent("y") * kBlockArea;
  LabeledTensor out = f;
  auto& d = out.mutable_data();
  for (size_t p = 0; p < c; ++p) {
    const double scale =
        params.gamma[p] / std::sqrt(stats.variance[p] + params.epsilon);
    double* base = &d[p * samples];
    for (size_t i = 0; i < samples; i += kBlockArea) {
      base[i] -= 8.0 * stats.mean[p];
    }
    for (size_t i = 0; i < samples; ++i) base[i] *= scale;
    for (size_t i = 0; i < samples; i += kBlockArea) {
      base[i] += 8.0 * params.beta[p];
    }
  }
  return out;
}

std::vector<double> GapTransform(const LabeledTensor& f) {
  if (f.Labels() != kGridAxes) {
    throw Error(ErrorCode::kShapeMismatch, "expected a [p, x, y, k] grid");
  }
  const size_t c = f.Extent("p");
  const size_t blocks = f.Extent("x") * f.Extent("y");
  std::vector<double> out(c);
  const auto& d = f.data();
  for (size_t p = 0; p < c; ++p) {
    double s = 0.0;
    const double* base = &d[p * blocks * kBlockArea];
    for (size_t b = 0; b < blocks; ++b) s += base[b * kBlockArea];
    out[p] = s / (8.0 * static_cast<double>(blocks));
  }
  return out;
}

std::vector<ReluSweepRow> ReluSweep(size_t blocks, uint64_t seed) {
  if (blocks == 0) throw Error(ErrorCode::kInvalidArgument, "need >= 1 block");
  // Blocks are drawn sequentially so results do not depend on threading.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> samples(blocks * kBlockArea);
  for (size_t b = 0; b < blocks; ++b) {
    double small[16];
    for (double& v : small) v = uniform(rng);
    for (size_t i = 0; i < 8; ++i) {
      for (size_t j = 0; j < 8; ++j) {
        samples[b * kBlockArea + i * 8 + j] = small[(i / 2) * 4 + j / 2];
      }
    }
  }

  constexpr int kRows = kMaxReluFrequency;
  constexpr size_t kChunks = 64;
  const size_t chunk = (blocks + kChunks - 1) / kChunks;
  std::vector<std::array<double, 2 * kRows>> partial_sums(kChunks);
  const auto& basis = BasisImages();
  ParallelFor(kChunks, [&](size_t c) {
    auto& acc = partial_sums[c];
    acc.fill(0.0);
    const size_t begin = c * chunk;
    const size_t end = std::min(blocks, begin + chunk);
    for (size_t b = begin; b < end; ++b) {
      const double* x = &samples[b * kBlockArea];
      double coef[kBlockArea];
      for (size_t f = 0; f < kBlockArea; ++f) {
        double s = 0.0;
        for (size_t px = 0; px < kBlockArea; ++px) s += basis[f][px] * x[px];
        coef[f] = s;
      }
      // p_m grows one anti-diagonal at a time.
      double p[kBlockArea] = {};
      for (int m = 0; m <= kRows; ++m) {
        for (int a = 0; a < 8; ++a) {
          const int bb = m - a;
          if (bb < 0 || bb > 7) continue;
          const double v = coef[a * 8 + bb];
          const auto& img = basis[a * 8 + bb];
          for (size_t px = 0; px < kBlockArea; ++px) p[px] += v * img[px];
        }
        if (m == 0) continue;
        double se_asm = 0.0;
        double se_naive = 0.0;
        for (size_t px = 0; px < kBlockArea; ++px) {
          const double truth = std::max(x[px], 0.0);
          const double asm_v = p[px] >= 0.0 ? x[px] : 0.0;
          const double naive_v = std::max(p[px], 0.0);
          se_asm += (asm_v - truth) * (asm_v - truth);
          se_naive += (naive_v - truth) * (naive_v - truth);
        }
        acc[2 * (m - 1)] += se_asm;
        acc[2 * (m - 1) + 1] += se_naive;
      }
    }
  });

  std::vector<ReluSweepRow> rows(kRows);
  const double n = static_cast<double>(blocks * kBlockArea);
  for (int m = 1; m <= kRows; ++m) {
    double se_asm = 0.0;
    double se_naive = 0.0;
    for (const auto& acc : partial_sums) {
      se_asm += acc[2 * (m - 1)];
      se_naive += acc[2 * (m - 1) + 1];
    }
    rows[m - 1] = {m, std::sqrt(se_asm / n), std::sqrt(se_naive / n)};
  }
  return rows;
}

}  // namespace jpegspace
