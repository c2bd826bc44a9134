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

#include "jpegspace/verify.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "jpegspace/error.h"
#include "jpegspace/harmonic.h"
#include "jpegspace/jdr_ops.h"
#include "jpegspace/jpeg_codec.h"
#include "jpegspace/jpeg_linear.h"
#include "jpegspace/pixel_ops.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

namespace {

constexpr double kFaultMagnitude = 1e-3;

class Check {
 public:
  Check(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }
  void Observe(double deviation) {
    // NaN must fail, so compare with !(a <= b).
    if (!(deviation <= result_.deviation)) result_.deviation = deviation;
  }
  CheckResult Finish() {
    result_.passed = result_.deviation <= result_.tolerance;
    return result_;
  }

 private:
  CheckResult result_;
};

LabeledTensor Uniform(std::vector<Axis> axes, double lo, double hi,
                      std::mt19937_64& rng) {
  LabeledTensor t(std::move(axes));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.mutable_data()) v = u(rng);
  return t;
}

QuantizationMatrix RandomQ(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(1, 255);
  std::array<int, kBlockArea> q{};
  for (int& v : q) v = u(rng);
  return QuantizationMatrix::FromZigzag(q);
}

LabeledTensor ScaleByQ(const LabeledTensor& f, const QuantizationMatrix& q,
                       bool divide) {
  LabeledTensor out = f;
  auto& d = out.mutable_data();
  for (size_t i = 0; i < d.size(); ++i) {
    const double qk = q.zigzag(i % kBlockArea);
    d[i] = divide ? d[i] / qk : d[i] * qk;
  }
  return out;
}

void LinearMapChecks(const VerifyOptions& options, std::mt19937_64& rng,
                     std::vector<CheckResult>& out) {
  Check procedure("map_vs_procedure", 1e-8);
  Check round_trip("linear_round_trip", 1e-8);
  Check blockwise("blockwise_maps", 1e-8);
  std::vector<QuantizationMatrix> qs;
  for (size_t i = 0; i < options.quality_matrices; ++i) qs.push_back(RandomQ(rng));
  if (qs.empty()) qs.emplace_back();

  std::map<std::pair<size_t, size_t>, JpegMaps> cache;
  for (size_t n = 0; n < options.images; ++n) {
    const size_t qi = n % qs.size();
    const size_t edge = options.sizes[(n / qs.size()) % options.sizes.size()];
    auto it = cache.find({qi, edge});
    if (it == cache.end()) {
      it = cache.emplace(std::make_pair(qi, edge), ComposeJpeg(edge, edge, qs[qi]))
               .first;
    }
    const JpegMaps& maps = it->second;
    const QuantizationMatrix& q = qs[qi];

    LabeledTensor image = Uniform({{"h", edge}, {"w", edge}}, 0.0, 255.0, rng);
    LabeledTensor centred = image;
    for (double& v : centred.mutable_data()) v -= 128.0;

    const LabeledTensor coef = ApplyCompress(maps.compress, centred);
    const LabeledTensor expected = ScaleByQ(ForwardBlocks(image).blocks, q, true);
    procedure.Observe(MaxAbsDifference(coef, expected));
    round_trip.Observe(
        MaxAbsDifference(ApplyDecompress(maps.decompress, coef), centred));
    blockwise.Observe(MaxAbsDifference(CompressBlockwise(centred, q), coef));
    blockwise.Observe(MaxAbsDifference(DecompressBlockwise(coef, q),
                                       ApplyDecompress(maps.decompress, coef)));
  }
  out.push_back(procedure.Finish());
  out.push_back(round_trip.Finish());
  out.push_back(blockwise.Finish());
}

void ConvChecks(const VerifyOptions& options, std::mt19937_64& rng,
                std::vector<CheckResult>& out) {
  Check equivalence("xi_equivalence", 1e-8);
  Check builders("xi_builders_agree", 1e-10);
  const size_t edge = options.conv_edge;
  std::uniform_int_distribution<size_t> channels(1, 2);
  std::uniform_int_distribution<size_t> half(0, 2);
  for (size_t n = 0; n < options.conv_triples; ++n) {
    const QuantizationMatrix q =
        n % 2 == 0 ? QuantizationMatrix() : QualityToMatrix(50, PlaneKind::kLuma);
    const JpegMaps maps = ComposeJpeg(edge, edge, q);
    const size_t out_c = channels(rng);
    const size_t in_c = channels(rng);
    const size_t kh = 2 * half(rng) + 1;
    const size_t kw = 2 * half(rng) + 1;
    const LabeledTensor kernel = Uniform(
        {{"out", out_c}, {"in", in_c}, {"kh", kh}, {"kw", kw}}, -1.0, 1.0, rng);
    const LabeledTensor image =
        Uniform({{"p", in_c}, {"h", edge}, {"w", edge}}, -128.0, 127.0, rng);

    CompressedConv fast = ExplodeConvFast(kernel, maps);
    const CompressedConv naive = ExplodeConvNaive(kernel, maps);
    builders.Observe(MaxAbsDifference(fast.xi, naive.xi));
    if (options.inject_fault) {
      for (double& v : fast.xi.mutable_data()) v += kFaultMagnitude;
    }

    const LabeledTensor expected =
        ApplyCompress(maps.compress, Conv2d(image, kernel));
    const LabeledTensor actual = fast.Apply(ApplyCompress(maps.compress, image));
    const double scale = std::max(expected.MaxAbs(), 1e-300);
    equivalence.Observe(MaxAbsDifference(actual, expected) / scale);
  }
  out.push_back(equivalence.Finish());
  out.push_back(builders.Finish());
}

void StatisticsChecks(const VerifyOptions& options, std::mt19937_64& rng,
                      std::vector<CheckResult>& out) {
  Check gap("gap_equivalence", 1e-10);
  Check stats("bn_statistics", 1e-8);
  Check bn("bn_equivalence", 1e-6);
  const QuantizationMatrix ones;
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  for (size_t n = 0; n < 10; ++n) {
    const size_t c = 1 + n % 3;
    const size_t edge = options.sizes[n % options.sizes.size()];
    const double offset = shift(rng) * 20.0;
    LabeledTensor pixels =
        Uniform({{"p", c}, {"h", edge}, {"w", edge}}, -1.0, 1.0, rng);
    for (double& v : pixels.mutable_data()) v = v * 3.0 + offset;
    const LabeledTensor f = CompressBlockwise(pixels, ones);

    const auto gap_dct = GapTransform(f);
    const auto gap_pixel = GlobalAveragePoolPixel(pixels);
    for (size_t p = 0; p < c; ++p) gap.Observe(std::abs(gap_dct[p] - gap_pixel[p]));

    for (bool bessel : {false, true}) {
      const auto sd = CoefficientStatistics(f, bessel);
      const auto sp = PixelStatistics(pixels, bessel);
      for (size_t p = 0; p < c; ++p) {
        stats.Observe(std::abs(sd.mean[p] - sp.mean[p]));
        stats.Observe(std::abs(sd.variance[p] - sp.variance[p]));
      }
    }

    BnParams params;
    for (size_t p = 0; p < c; ++p) {
      params.gamma.push_back(u(rng));
      params.beta.push_back(shift(rng));
      params.running_mean.push_back(shift(rng));
      params.running_var.push_back(u(rng));
    }
    for (BnMode mode : {BnMode::kBatchStatistics, BnMode::kInference}) {
      const LabeledTensor via_dct =
          DecompressBlockwise(BnTransform(f, params, mode), ones);
      bn.Observe(MaxAbsDifference(via_dct, BatchNormPixel(pixels, params, mode)));
    }
  }
  out.push_back(gap.Finish());
  out.push_back(stats.Finish());
  out.push_back(bn.Finish());
}

void TheoremChecks(const VerifyOptions& options, std::mt19937_64& rng,
                   std::vector<CheckResult>& out) {
  Check mean_variance("mean_variance", 1e-10);
  for (size_t n = 0; n < options.theorem_blocks; ++n) {
    LabeledTensor block = Uniform({{"m", 8}, {"n", 8}}, -1.0, 1.0, rng);
    auto& d = block.mutable_data();
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= 64.0;
    double var = 0.0;
    for (double& v : d) {
      v -= mean;
      var += v * v;
    }
    var /= 64.0;
    const LabeledTensor coef = Dct2Forward(block);
    double energy = 0.0;
    for (double y : coef.data()) energy += y * y;
    mean_variance.Observe(std::abs(var - energy / 64.0));
  }
  out.push_back(mean_variance.Finish());

  Check least_squares("least_squares", 1e-9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (size_t n = 0; n < 10; ++n) {
    std::vector<double> samples(8);
    for (double& v : samples) v = u(rng);
    for (size_t m = 1; m <= 8; ++m) {
      const auto check = DctLeastSquaresCheck(samples, m, 1000, rng());
      least_squares.Observe(
          std::abs(check.approx_error - check.normal_equations_error));
      // A perturbation beating the truncation is an outright failure.
      if (!check.is_minimal) least_squares.Observe(1.0);
    }
  }
  out.push_back(least_squares.Finish());
}

void ReluChecks(std::mt19937_64& rng, std::vector<CheckResult>& out) {
  Check exact("asm_exact", 1e-10);
  Check identity("psi_identity", 1e-10);
  const QuantizationMatrix ones;
  const MaskMap& psi = GetMaskMap();
  for (size_t n = 0; n < 4; ++n) {
    const LabeledTensor pixels =
        Uniform({{"p", 2}, {"h", 16}, {"w", 16}}, -1.0, 1.0, rng);
    const LabeledTensor f = CompressBlockwise(pixels, ones);
    const LabeledTensor expected = CompressBlockwise(ReluPixel(pixels), ones);
    exact.Observe(MaxAbsDifference(
        AsmRelu(f, kMaxReluFrequency, ReluVariant::kAsm, psi), expected));

    LabeledTensor mask(
        {{"p", 2}, {"x", 2}, {"y", 2}, {"m", kBlockSize}, {"n", kBlockSize}});
    std::fill(mask.mutable_data().begin(), mask.mutable_data().end(), 1.0);
    identity.Observe(MaxAbsDifference(ApplyMask(psi, f, mask), f));
  }
  out.push_back(exact.Finish());
  out.push_back(identity.Finish());
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerifyReport::Find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

VerifyReport RunVerify(const VerifyOptions& options) {
  if (options.sizes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "verify needs at least one size");
  }
  for (size_t s : options.sizes) {
    if (s == 0 || s % kBlockSize != 0 || s > kMaxDenseEdge) {
      throw Error(ErrorCode::kInvalidArgument,
                  "verify sizes must be multiples of 8 up to 64");
    }
  }
  if (options.conv_edge == 0 || options.conv_edge % kBlockSize != 0 ||
      options.conv_edge > kMaxExplodedEdge) {
    throw Error(ErrorCode::kInvalidArgument,
                "conv edge must be a multiple of 8 up to 32");
  }
  // One stream per check group, so changing a count in one group leaves the
  // others' inputs alone.
  std::seed_seq seq{options.seed};
  std::array<uint64_t, 5> seeds{};
  seq.generate(seeds.begin(), seeds.end());

  VerifyReport report;
  std::mt19937_64 r0(seeds[0]), r1(seeds[1]), r2(seeds[2]), r3(seeds[3]),
      r4(seeds[4]);
  LinearMapChecks(options, r0, report.checks);
  ConvChecks(options, r1, report.checks);
  StatisticsChecks(options, r2, report.checks);
  TheoremChecks(options, r3, report.checks);
  ReluChecks(r4, report.checks);
  return report;
}

}  // namespace jpegspace
