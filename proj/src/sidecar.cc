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

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

enum class LayerTag : uint8_t {
  kConv = 1,
  kBatchNorm = 2,
  kRelu = 3,
  kResidual = 4,
  kGap = 5,
  kFc = 6,
};

// Guards against absurd allocations from corrupt headers.
constexpr uint64_t kMaxElements = uint64_t{1} << 31;

class Writer {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void I16(int16_t v) {
    const auto u = static_cast<uint16_t>(v);
    out_.push_back(static_cast<uint8_t>(u & 0xFF));
    out_.push_back(static_cast<uint8_t>(u >> 8));
  }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Bytes(const char* magic, size_t n) {
    out_.insert(out_.end(), magic, magic + n);
  }
  void String(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  void Vector(const std::vector<double>& v) {
    U64(v.size());
    for (double x : v) F64(x);
  }
  void Tensor(const LabeledTensor& t) {
    U32(static_cast<uint32_t>(t.rank()));
    for (const auto& a : t.axes()) {
      String(a.label);
      U64(a.extent);
    }
    for (double x : t.data()) F64(x);
  }
  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}

  void Magic(const char* magic) {
    Need(4);
    if (std::memcmp(in_.data() + pos_, magic, 4) != 0) {
      throw Error(ErrorCode::kMalformedStream,
                  std::string("sidecar: expected magic ") + magic);
    }
    pos_ += 4;
    const uint32_t version = U32();
    if (version != kSidecarVersion) {
      throw Error(ErrorCode::kUnsupportedFeature,
                  "sidecar: version " + std::to_string(version));
    }
  }
  uint8_t U8() {
    Need(1);
    return in_[pos_++];
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  int16_t I16() {
    Need(2);
    const uint16_t v = static_cast<uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return static_cast<int16_t>(v);
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string String() {
    const uint32_t n = U32();
    Need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> Vector() {
    const uint64_t n = Count(U64(), 8);
    std::vector<double> v(n);
    for (double& x : v) x = F64();
    return v;
  }
  LabeledTensor Tensor() {
    const uint32_t rank = U32();
    if (rank > 16) throw Error(ErrorCode::kMalformedStream, "sidecar: rank > 16");
    std::vector<Axis> axes;
    uint64_t total = 1;
    for (uint32_t i = 0; i < rank; ++i) {
      Axis a;
      a.label = String();
      a.extent = U64();
      if (a.extent == 0 || a.extent > kMaxElements) {
        throw Error(ErrorCode::kMalformedStream, "sidecar: bad extent");
      }
      total *= a.extent;
      if (total > kMaxElements) {
        throw Error(ErrorCode::kMalformedStream, "sidecar: tensor too large");
      }
      axes.push_back(std::move(a));
    }
    Count(total, 8);
    std::vector<double> data(total);
    for (double& x : data) x = F64();
    return LabeledTensor(std::move(axes), std::move(data));
  }
  void End() {
    if (pos_ != in_.size()) {
      throw Error(ErrorCode::kMalformedStream, "sidecar: trailing bytes");
    }
  }

 private:
  void Need(size_t n) {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedStream, "truncated stream: sidecar");
    }
  }
  uint64_t Count(uint64_t n, size_t element) {
    if (n > kMaxElements) throw Error(ErrorCode::kMalformedStream, "sidecar: count");
    Need(n * element);
    return n;
  }

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

void WriteConv(Writer& w, const ConvLayer& c) {
  w.Tensor(c.weights);
  w.Vector(c.bias);
  w.U32(static_cast<uint32_t>(c.stride));
}

ConvLayer ReadConv(Reader& r) {
  ConvLayer c;
  c.weights = r.Tensor();
  c.bias = r.Vector();
  c.stride = r.U32();
  return c;
}

void WriteBn(Writer& w, const BatchNormLayer& b) {
  w.Vector(b.params.gamma);
  w.Vector(b.params.beta);
  w.Vector(b.params.running_mean);
  w.Vector(b.params.running_var);
  w.F64(b.params.epsilon);
  w.U8(b.params.bessel ? 1 : 0);
}

BatchNormLayer ReadBn(Reader& r) {
  BatchNormLayer b;
  b.params.gamma = r.Vector();
  b.params.beta = r.Vector();
  b.params.running_mean = r.Vector();
  b.params.running_var = r.Vector();
  b.params.epsilon = r.F64();
  b.params.bessel = r.U8() != 0;
  return b;
}

}  // namespace

std::vector<uint8_t> SerializeTensor(const LabeledTensor& t) {
  Writer w;
  w.Bytes("JSTN", 4);
  w.U32(kSidecarVersion);
  w.Tensor(t);
  return w.Take();
}

LabeledTensor ParseTensor(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  r.Magic("JSTN");
  LabeledTensor t = r.Tensor();
  r.End();
  return t;
}

std::vector<uint8_t> SerializeCoefficients(const JpegData& data) {
  if (data.components.size() != data.quantization.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one table per component required");
  }
  Writer w;
  w.Bytes("JSCF", 4);
  w.U32(kSidecarVersion);
  w.U32(static_cast<uint32_t>(data.height));
  w.U32(static_cast<uint32_t>(data.width));
  w.U8(data.subsampling == Subsampling::k420 ? 1 : 0);
  w.U8(static_cast<uint8_t>(data.components.size()));
  for (size_t c = 0; c < data.components.size(); ++c) {
    for (int q : data.quantization[c].zigzag_values()) w.U8(static_cast<uint8_t>(q));
    const auto& grid = data.components[c];
    w.U32(static_cast<uint32_t>(grid.block_rows()));
    w.U32(static_cast<uint32_t>(grid.block_cols()));
    for (double v : grid.blocks.data()) {
      if (v != std::round(v) || std::abs(v) > 32767) {
        throw Error(ErrorCode::kInvalidArgument,
                    "coefficient sidecar stores quantised int16 values");
      }
      w.I16(static_cast<int16_t>(v));
    }
  }
  return w.Take();
}

JpegData ParseCoefficients(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  r.Magic("JSCF");
  JpegData data;
  data.height = r.U32();
  data.width = r.U32();
  const uint8_t mode = r.U8();
  if (mode > 1) throw Error(ErrorCode::kMalformedStream, "sidecar: subsampling");
  data.subsampling = mode == 1 ? Subsampling::k420 : Subsampling::k444;
  const uint8_t nc = r.U8();
  if (nc != 1 && nc != 3) {
    throw Error(ErrorCode::kMalformedStream, "sidecar: component count");
  }
  for (uint8_t c = 0; c < nc; ++c) {
    std::array<int, kBlockArea> q{};
    for (int& v : q) v = r.U8();
    data.quantization.push_back(QuantizationMatrix::FromZigzag(q));
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    if (rows == 0 || cols == 0 || uint64_t{rows} * cols > (1u << 24)) {
      throw Error(ErrorCode::kMalformedStream, "sidecar: grid size");
    }
    CoefficientGrid grid;
    grid.plane = c;
    grid.quantized = true;
    grid.blocks = LabeledTensor({{"x", rows}, {"y", cols}, {"k", kBlockArea}});
    for (double& v : grid.blocks.mutable_data()) v = r.I16();
    data.components.push_back(std::move(grid));
  }
  r.End();
  return data;
}

std::vector<uint8_t> SerializeNetwork(const NetworkSpec& spec) {
  spec.Validate();
  Writer w;
  w.Bytes("JSNN", 4);
  w.U32(kSidecarVersion);
  w.U32(static_cast<uint32_t>(spec.channels));
  w.U32(static_cast<uint32_t>(spec.height));
  w.U32(static_cast<uint32_t>(spec.width));
  w.U32(static_cast<uint32_t>(spec.layers.size()));
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kConv));
      WriteConv(w, *conv);
    } else if (const auto* bn = std::get_if<BatchNormLayer>(&layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kBatchNorm));
      WriteBn(w, *bn);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kRelu));
    } else if (const auto* block = std::get_if<ResidualBlock>(&layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kResidual));
      WriteConv(w, block->conv1);
      WriteBn(w, block->bn1);
      WriteConv(w, block->conv2);
      WriteBn(w, block->bn2);
    } else if (std::holds_alternative<GapLayer>(layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kGap));
    } else if (const auto* fc = std::get_if<FcLayer>(&layer)) {
      w.U8(static_cast<uint8_t>(LayerTag::kFc));
      w.Tensor(fc->weights);
      w.Vector(fc->bias);
    }
  }
  return w.Take();
}

NetworkSpec ParseNetwork(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  r.Magic("JSNN");
  NetworkSpec spec;
  spec.channels = r.U32();
  spec.height = r.U32();
  spec.width = r.U32();
  const uint32_t count = r.U32();
  if (count > 4096) throw Error(ErrorCode::kMalformedStream, "sidecar: layers");
  for (uint32_t i = 0; i < count; ++i) {
    switch (static_cast<LayerTag>(r.U8())) {
      case LayerTag::kConv:
        spec.layers.push_back(ReadConv(r));
        break;
      case LayerTag::kBatchNorm:
        spec.layers.push_back(ReadBn(r));
        break;
      case LayerTag::kRelu:
        spec.layers.push_back(ReluLayer{});
        break;
      case LayerTag::kResidual: {
        ResidualBlock block;
        block.conv1 = ReadConv(r);
        block.bn1 = ReadBn(r);
        block.conv2 = ReadConv(r);
        block.bn2 = ReadBn(r);
        spec.layers.push_back(std::move(block));
        break;
      }
      case LayerTag::kGap:
        spec.layers.push_back(GapLayer{});
        break;
      case LayerTag::kFc: {
        FcLayer fc;
        fc.weights = r.Tensor();
        fc.bias = r.Vector();
        spec.layers.push_back(std::move(fc));
        break;
      }
      default:
        throw Error(ErrorCode::kMalformedStream, "sidecar: unknown layer tag");
    }
  }
  r.End();
  spec.Validate();
  return spec;
}

}  // namespace jpegspace
