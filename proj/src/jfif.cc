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

#include "jpegspace/jfif.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

constexpr uint8_t kSoi = 0xD8;
constexpr uint8_t kEoi = 0xD9;
constexpr uint8_t kSof0 = 0xC0;
constexpr uint8_t kSof1 = 0xC1;
constexpr uint8_t kSof2 = 0xC2;
constexpr uint8_t kDht = 0xC4;
constexpr uint8_t kDac = 0xCC;
constexpr uint8_t kSos = 0xDA;
constexpr uint8_t kDqt = 0xDB;
constexpr uint8_t kDnl = 0xDC;
constexpr uint8_t kDri = 0xDD;
constexpr uint8_t kApp0 = 0xE0;
constexpr uint8_t kCom = 0xFE;

HuffmanSpec MakeSpec(std::array<uint8_t, 16> counts,
                     std::vector<uint8_t> symbols) {
  HuffmanSpec spec{counts, std::move(symbols)};
  size_t total = 0;
  for (uint8_t c : spec.counts) total += c;
  if (total != spec.symbols.size()) {
    throw Error(ErrorCode::kMalformedStream, "Huffman table size mismatch");
  }
  return spec;
}

std::vector<uint8_t> AcSymbols(std::initializer_list<uint8_t> head,
                               uint8_t first_full_row) {
  // Both AC tables end with the runs (r, 2..10) for r >= first_full_row
  // except those already listed in `head`.
  std::vector<uint8_t> out(head);
  for (int r = first_full_row; r < 16; ++r) {
    for (int s = 1; s <= 10; ++s) {
      const uint8_t sym = static_cast<uint8_t>(r << 4 | s);
      if (std::find(out.begin(), out.end(), sym) == out.end()) {
        out.push_back(sym);
      }
    }
  }
  return out;
}

std::string Hex(uint8_t v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "0x%02X", v);
  return buf;
}

[[noreturn]] void Truncated(const std::string& what) {
  throw Error(ErrorCode::kTruncatedStream, "truncated stream: " + what);
}

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedStream, "malformed JPEG: " + what);
}

[[noreturn]] void Unsupported(const std::string& what) {
  throw Error(ErrorCode::kUnsupportedFeature, "unsupported JPEG feature: " + what);
}

int Category(int v) {
  int a = std::abs(v);
  int s = 0;
  while (a > 0) {
    ++s;
    a >>= 1;
  }
  return s;
}

struct EncodeTable {
  std::array<uint16_t, 256> code{};
  std::array<uint8_t, 256> length{};
};

EncodeTable BuildEncodeTable(const HuffmanSpec& spec) {
  EncodeTable t;
  uint32_t code = 0;
  size_t i = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int n = 0; n < spec.counts[len - 1]; ++n) {
      t.code[spec.symbols[i]] = static_cast<uint16_t>(code);
      t.length[spec.symbols[i]] = static_cast<uint8_t>(len);
      ++code;
      ++i;
    }
    code <<= 1;
  }
  return t;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}

  void Put(uint32_t bits, int count) {
    for (int i = count - 1; i >= 0; --i) {
      acc_ = static_cast<uint8_t>(acc_ << 1 | ((bits >> i) & 1));
      if (++filled_ == 8) Emit();
    }
  }

  void Symbol(const EncodeTable& t, uint8_t symbol) {
    if (t.length[symbol] == 0) Malformed("symbol without a Huffman code");
    Put(t.code[symbol], t.length[symbol]);
  }

  // Pads the final byte with ones.
  void Flush() {
    while (filled_ != 0) Put(1, 1);
  }

 private:
  void Emit() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    filled_ = 0;
  }

  std::vector<uint8_t>& out_;
  uint8_t acc_ = 0;
  int filled_ = 0;
};

void PutU16(std::vector<uint8_t>& out, size_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void PutMarker(std::vector<uint8_t>& out, uint8_t marker) {
  out.push_back(0xFF);
  out.push_back(marker);
}

struct ComponentLayout {
  int h = 1;
  int v = 1;
  size_t rows = 0;  // blocks
  size_t cols = 0;
};

// Block grid of each component covering whole MCUs.
std::vector<ComponentLayout> Layout(size_t height, size_t width,
                                    size_t components, Subsampling mode) {
  std::vector<ComponentLayout> out(components);
  if (components == 3 && mode == Subsampling::k420) {
    out[0].h = out[0].v = 2;
  }
  const int hmax = out[0].h;
  const int vmax = out[0].v;
  const size_t mcu_rows = (height + 8 * vmax - 1) / (8 * vmax);
  const size_t mcu_cols = (width + 8 * hmax - 1) / (8 * hmax);
  for (auto& c : out) {
    c.rows = mcu_rows * c.v;
    c.cols = mcu_cols * c.h;
  }
  return out;
}

void EncodeBlock(BitWriter& bits, const double* coef, int& predictor,
                 const EncodeTable& dc, const EncodeTable& ac) {
  const int value = static_cast<int>(coef[0]);
  const int diff = value - predictor;
  predictor = value;
  const int s = Category(diff);
  if (s > 11) Malformed("DC difference out of range");
  bits.Symbol(dc, static_cast<uint8_t>(s));
  if (s > 0) bits.Put(static_cast<uint32_t>(diff < 0 ? diff - 1 : diff) & ((1u << s) - 1), s);
  int run = 0;
  for (size_t k = 1; k < kBlockArea; ++k) {
    const int v = static_cast<int>(coef[k]);
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      bits.Symbol(ac, 0xF0);
      run -= 16;
    }
    const int size = Category(v);
    if (size > 10) Malformed("AC coefficient out of range");
    bits.Symbol(ac, static_cast<uint8_t>(run << 4 | size));
    bits.Put(static_cast<uint32_t>(v < 0 ? v - 1 : v) & ((1u << size) - 1), size);
    run = 0;
  }
  if (run > 0) bits.Symbol(ac, 0x00);
}

struct DecodeTable {
  std::array<int32_t, 18> maxcode{};
  std::array<int32_t, 17> valptr{};
  std::array<int32_t, 17> mincode{};
  std::vector<uint8_t> symbols;
  bool defined = false;
};

DecodeTable BuildDecodeTable(const HuffmanSpec& spec) {
  DecodeTable t;
  t.symbols = spec.symbols;
  t.defined = true;
  int32_t code = 0;
  int32_t index = 0;
  for (int len = 1; len <= 16; ++len) {
    const int n = spec.counts[len - 1];
    if (n == 0) {
      t.maxcode[len] = -1;
    } else {
      t.valptr[len] = index;
      t.mincode[len] = code;
      code += n;
      index += n;
      t.maxcode[len] = code - 1;
    }
    if (code > (1 << len)) Malformed("Huffman table overfull");
    code <<= 1;
  }
  t.maxcode[17] = INT32_MAX;
  return t;
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  bool AtEnd() const { return pos_ >= data_.size(); }
  size_t pos() const { return pos_; }
  void Seek(size_t pos) { pos_ = pos; }

  uint8_t U8(const char* what) {
    if (pos_ >= data_.size()) Truncated(what);
    return data_[pos_++];
  }
  size_t U16(const char* what) {
    const size_t hi = U8(what);
    return hi << 8 | U8(what);
  }
  std::span<const uint8_t> data() const { return data_; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Reads entropy-coded bits, removing stuffed zero bytes. Reaching a marker
// or the end of input while bits are still needed means the scan is short.
class BitReader {
 public:
  explicit BitReader(ByteReader& bytes) : bytes_(bytes) {}

  int Bit() {
    if (left_ == 0) Fill();
    --left_;
    return (cur_ >> left_) & 1;
  }

  int Receive(int count) {
    int v = 0;
    for (int i = 0; i < count; ++i) v = v << 1 | Bit();
    return v;
  }

  int Decode(const DecodeTable& t) {
    int32_t code = Bit();
    int len = 1;
    while (code > t.maxcode[len]) {
      code = code << 1 | Bit();
      if (++len > 16) Malformed("invalid Huffman code");
    }
    return t.symbols[t.valptr[len] + code - t.mincode[len]];
  }

 private:
  void Fill() {
    const uint8_t b = bytes_.U8("entropy-coded data");
    if (b == 0xFF) {
      const uint8_t next = bytes_.U8("entropy-coded data");
      if (next != 0x00) Truncated("scan ended before all blocks were decoded");
    }
    cur_ = b;
    left_ = 8;
  }

  ByteReader& bytes_;
  uint8_t cur_ = 0;
  int left_ = 0;
};

int Extend(int v, int s) {
  return (s > 0 && v < (1 << (s - 1))) ? v - (1 << s) + 1 : v;
}

struct FrameComponent {
  int id = 0;
  int h = 1;
  int v = 1;
  int tq = 0;
  size_t rows = 0;
  size_t cols = 0;
  bool scanned = false;
  std::optional<QuantizationMatrix> table;
};

void DecodeBlock(BitReader& bits, double* coef, int& predictor,
                 const DecodeTable& dc, const DecodeTable& ac) {
  const int s = bits.Decode(dc);
  if (s > 11) Malformed("DC category " + std::to_string(s));
  predictor += Extend(bits.Receive(s), s);
  coef[0] = predictor;
  for (size_t k = 1; k < kBlockArea;) {
    const int rs = bits.Decode(ac);
    const int r = rs >> 4;
    const int size = rs & 15;
    if (size == 0) {
      if (r != 15) break;
      k += 16;
      continue;
    }
    k += static_cast<size_t>(r);
    if (k >= kBlockArea) Malformed("AC run past the end of the block");
    coef[k++] = Extend(bits.Receive(size), size);
  }
}

}  // namespace

const HuffmanSpec& DefaultDcLuma() {
  static const HuffmanSpec spec =
      MakeSpec({0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
               {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  return spec;
}

const HuffmanSpec& DefaultDcChroma() {
  static const HuffmanSpec spec =
      MakeSpec({0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
               {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  return spec;
}

const HuffmanSpec& DefaultAcLuma() {
  static const HuffmanSpec spec = MakeSpec(
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      AcSymbols({0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31,
                 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32,
                 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52,
                 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16,
                 0x17, 0x18, 0x19, 0x1a},
                2));
  return spec;
}

const HuffmanSpec& DefaultAcChroma() {
  static const HuffmanSpec spec = MakeSpec(
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      AcSymbols({0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06,
                 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81,
                 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33,
                 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34,
                 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26},
                2));
  return spec;
}

std::vector<uint8_t> JfifSerialize(const JpegData& data) {
  const size_t nc = data.components.size();
  if ((nc != 1 && nc != 3) || data.quantization.size() != nc) {
    throw Error(ErrorCode::kInvalidArgument,
                "JFIF needs 1 or 3 components with one table each");
  }
  if (data.height == 0 || data.width == 0 || data.height > 65535 ||
      data.width > 65535) {
    throw Error(ErrorCode::kOutOfRange, "image dimensions outside [1, 65535]");
  }
  const Subsampling mode = nc == 3 ? data.subsampling : Subsampling::k444;
  const auto layout = Layout(data.height, data.width, nc, mode);
  for (size_t c = 0; c < nc; ++c) {
    const auto& grid = data.components[c];
    if (grid.blocks.Labels() != std::vector<std::string>{"x", "y", "k"} ||
        grid.block_rows() != layout[c].rows ||
        grid.block_cols() != layout[c].cols) {
      throw Error(ErrorCode::kShapeMismatch,
                  "component " + std::to_string(c) +
                      " grid does not cover the MCU grid");
    }
    for (double v : grid.blocks.data()) {
      if (v != std::round(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "component " + std::to_string(c) + " is not quantised");
      }
    }
  }
  // Table ids: identical matrices share an id.
  std::vector<QuantizationMatrix> tables;
  std::vector<int> table_of(nc);
  for (size_t c = 0; c < nc; ++c) {
    auto it = std::find(tables.begin(), tables.end(), data.quantization[c]);
    if (it == tables.end()) {
      tables.push_back(data.quantization[c]);
      it = tables.end() - 1;
    }
    table_of[c] = static_cast<int>(it - tables.begin());
  }

  std::vector<uint8_t> out;
  PutMarker(out, kSoi);
  PutMarker(out, kApp0);
  PutU16(out, 16);
  for (uint8_t b : {'J', 'F', 'I', 'F', '\0'}) out.push_back(b);
  for (uint8_t b : {1, 1, 0, 0, 1, 0, 1, 0, 0}) out.push_back(b);

  PutMarker(out, kDqt);
  PutU16(out, 2 + 65 * tables.size());
  for (size_t t = 0; t < tables.size(); ++t) {
    out.push_back(static_cast<uint8_t>(t));
    for (int v : tables[t].zigzag_values()) out.push_back(static_cast<uint8_t>(v));
  }

  PutMarker(out, kSof0);
  PutU16(out, 8 + 3 * nc);
  out.push_back(8);
  PutU16(out, data.height);
  PutU16(out, data.width);
  out.push_back(static_cast<uint8_t>(nc));
  for (size_t c = 0; c < nc; ++c) {
    out.push_back(static_cast<uint8_t>(c + 1));
    out.push_back(static_cast<uint8_t>(layout[c].h << 4 | layout[c].v));
    out.push_back(static_cast<uint8_t>(table_of[c]));
  }

  std::vector<std::pair<uint8_t, const HuffmanSpec*>> dht = {
      {0x00, &DefaultDcLuma()}, {0x10, &DefaultAcLuma()}};
  if (nc == 3) {
    dht.push_back({0x01, &DefaultDcChroma()});
    dht.push_back({0x11, &DefaultAcChroma()});
  }
  size_t dht_len = 2;
  for (const auto& [id, spec] : dht) dht_len += 17 + spec->symbols.size();
  PutMarker(out, kDht);
  PutU16(out, dht_len);
  for (const auto& [id, spec] : dht) {
    out.push_back(id);
    out.insert(out.end(), spec->counts.begin(), spec->counts.end());
    out.insert(out.end(), spec->symbols.begin(), spec->symbols.end());
  }

  PutMarker(out, kSos);
  PutU16(out, 6 + 2 * nc);
  out.push_back(static_cast<uint8_t>(nc));
  for (size_t c = 0; c < nc; ++c) {
    out.push_back(static_cast<uint8_t>(c + 1));
    out.push_back(c == 0 ? 0x00 : 0x11);
  }
  for (uint8_t b : {0, 63, 0}) out.push_back(b);

  const EncodeTable dc_luma = BuildEncodeTable(DefaultDcLuma());
  const EncodeTable ac_luma = BuildEncodeTable(DefaultAcLuma());
  const EncodeTable dc_chroma = BuildEncodeTable(DefaultDcChroma());
  const EncodeTable ac_chroma = BuildEncodeTable(DefaultAcChroma());
  BitWriter bits(out);
  std::vector<int> predictor(nc, 0);
  const size_t mcu_rows = layout[0].rows / layout[0].v;
  const size_t mcu_cols = layout[0].cols / layout[0].h;
  for (size_t mr = 0; mr < mcu_rows; ++mr) {
    for (size_t mc = 0; mc < mcu_cols; ++mc) {
      for (size_t c = 0; c < nc; ++c) {
        const auto& grid = data.components[c].blocks.data();
        const size_t cols = layout[c].cols;
        for (int v = 0; v < layout[c].v; ++v) {
          for (int h = 0; h < layout[c].h; ++h) {
            const size_t x = mr * layout[c].v + v;
            const size_t y = mc * layout[c].h + h;
            EncodeBlock(bits, &grid[(x * cols + y) * kBlockArea], predictor[c],
                        c == 0 ? dc_luma : dc_chroma,
                        c == 0 ? ac_luma : ac_chroma);
          }
        }
      }
    }
  }
  bits.Flush();
  PutMarker(out, kEoi);
  return out;
}

JpegData JfifParse(std::span<const uint8_t> stream) {
  ByteReader in(stream);
  if (stream.size() < 2 || stream[0] != 0xFF || stream[1] != kSoi) {
    Malformed("missing SOI marker");
  }
  in.Seek(2);

  std::array<std::optional<QuantizationMatrix>, 4> qtables;
  std::array<DecodeTable, 4> dc_tables;
  std::array<DecodeTable, 4> ac_tables;
  std::vector<FrameComponent> frame;
  size_t height = 0;
  size_t width = 0;
  Subsampling mode = Subsampling::k444;
  std::vector<CoefficientGrid> grids;
  bool saw_eoi = false;

  while (!saw_eoi) {
    if (in.AtEnd()) Truncated("missing EOI marker");
    uint8_t b = in.U8("marker");
    if (b != 0xFF) Malformed("expected a marker, found " + Hex(b));
    uint8_t marker = in.U8("marker");
    while (marker == 0xFF) marker = in.U8("marker");

    if (marker == kEoi) {
      saw_eoi = true;
      break;
    }
    if (marker == kSoi || (marker >= 0xD0 && marker <= 0xD7)) {
      Malformed("unexpected marker " + Hex(marker));
    }
    const size_t length = in.U16("segment length");
    if (length < 2) Malformed("segment length below 2");
    const size_t start = in.pos();
    const size_t end = start + length - 2;
    if (end > stream.size()) Truncated("segment " + Hex(marker));

    if (marker == kSof2) Unsupported("progressive DCT (SOF2)");
    if (marker == kDac) Unsupported("arithmetic coding conditioning (DAC)");
    if (marker == kDnl) Unsupported("DNL marker");
    if (marker >= 0xC3 && marker <= 0xCF && marker != kDht && marker != kDac) {
      Unsupported("frame type " + Hex(marker) +
                  " (lossless, hierarchical or arithmetic-coded)");
    }

    if (marker == kDqt) {
      while (in.pos() < end) {
        const uint8_t pq_tq = in.U8("DQT");
        const int precision = pq_tq >> 4;
        const int id = pq_tq & 15;
        if (precision > 1 || id > 3) Malformed("bad DQT table header");
        std::array<int, kBlockArea> q{};
        for (auto& v : q) {
          v = precision == 0 ? in.U8("DQT") : static_cast<int>(in.U16("DQT"));
        }
        for (int v : q) {
          if (v == 0) Malformed("zero quantisation entry");
          if (v > 255) Unsupported("quantisation entries above 255");
        }
        qtables[id] = QuantizationMatrix::FromZigzag(q);
      }
    } else if (marker == kDht) {
      while (in.pos() < end) {
        const uint8_t tc_th = in.U8("DHT");
        const int tc = tc_th >> 4;
        const int th = tc_th & 15;
        if (tc > 1 || th > 3) Malformed("bad DHT table header");
        HuffmanSpec spec;
        size_t total = 0;
        for (auto& c : spec.counts) {
          c = in.U8("DHT");
          total += c;
        }
        if (total > 256) Malformed("DHT has more than 256 symbols");
        for (size_t i = 0; i < total; ++i) spec.symbols.push_back(in.U8("DHT"));
        (tc == 0 ? dc_tables : ac_tables)[th] = BuildDecodeTable(spec);
      }
    } else if (marker == kSof0 || marker == kSof1) {
      if (!frame.empty()) Malformed("second frame header");
      if (in.U8("SOF") != 8) Unsupported("sample precision other than 8 bits");
      height = in.U16("SOF");
      width = in.U16("SOF");
      if (height == 0) Unsupported("height defined by DNL");
      if (width == 0) Malformed("zero image width");
      const size_t nc = in.U8("SOF");
      if (nc != 1 && nc != 3) Unsupported(std::to_string(nc) + " components");
      for (size_t c = 0; c < nc; ++c) {
        FrameComponent fc;
        fc.id = in.U8("SOF");
        const uint8_t hv = in.U8("SOF");
        fc.h = hv >> 4;
        fc.v = hv & 15;
        fc.tq = in.U8("SOF");
        if (fc.tq > 3 || fc.h < 1 || fc.v < 1) Malformed("bad component spec");
        frame.push_back(fc);
      }
      if (nc == 1) {
        frame[0].h = frame[0].v = 1;
      } else {
        const bool chroma_unit = frame[1].h == 1 && frame[1].v == 1 &&
                                 frame[2].h == 1 && frame[2].v == 1;
        if (chroma_unit && frame[0].h == 1 && frame[0].v == 1) {
          mode = Subsampling::k444;
        } else if (chroma_unit && frame[0].h == 2 && frame[0].v == 2) {
          mode = Subsampling::k420;
        } else {
          Unsupported("sampling factors other than 4:4:4 and 4:2:0");
        }
      }
      const auto layout = Layout(height, width, nc, mode);
      for (size_t c = 0; c < nc; ++c) {
        frame[c].rows = layout[c].rows;
        frame[c].cols = layout[c].cols;
        CoefficientGrid grid;
        grid.plane = c;
        grid.quantized = true;
        grid.blocks = LabeledTensor(
            {{"x", layout[c].rows}, {"y", layout[c].cols}, {"k", kBlockArea}});
        grids.push_back(std::move(grid));
      }
    } else if (marker == kDri) {
      if (in.U16("DRI") != 0) Unsupported("restart intervals (DRI)");
    } else if (marker == kSos) {
      if (frame.empty()) Malformed("SOS before frame header");
      const size_t ns = in.U8("SOS");
      if (ns < 1 || ns > frame.size()) Malformed("bad scan component count");
      std::vector<size_t> members;
      std::vector<int> td(ns), ta(ns);
      for (size_t i = 0; i < ns; ++i) {
        const int id = in.U8("SOS");
        const uint8_t t = in.U8("SOS");
        auto it = std::find_if(frame.begin(), frame.end(),
                               [&](const FrameComponent& f) { return f.id == id; });
        if (it == frame.end()) Malformed("scan references unknown component");
        members.push_back(static_cast<size_t>(it - frame.begin()));
        td[i] = t >> 4;
        ta[i] = t & 15;
        if (td[i] > 3 || ta[i] > 3 || !dc_tables[td[i]].defined ||
            !ac_tables[ta[i]].defined) {
          Malformed("scan references an undefined Huffman table");
        }
      }
      const uint8_t ss = in.U8("SOS");
      const uint8_t se = in.U8("SOS");
      const uint8_t ahal = in.U8("SOS");
      if (ss != 0 || se != 63 || ahal != 0) {
        Unsupported("spectral selection or successive approximation");
      }
      if (in.pos() != end) Malformed("SOS length mismatch");
      for (size_t m : members) {
        if (!qtables[frame[m].tq]) {
          Malformed("component uses an undefined quantisation table");
        }
        frame[m].table = qtables[frame[m].tq];
        frame[m].scanned = true;
      }

      BitReader bits(in);
      std::vector<int> predictor(ns, 0);
      if (ns == 1) {
        // Non-interleaved: one block per MCU over the component's own size.
        const size_t m = members[0];
        const int hmax = frame[0].h;
        const int vmax = frame[0].v;
        const size_t comp_h = (height * frame[m].v + vmax - 1) / vmax;
        const size_t comp_w = (width * frame[m].h + hmax - 1) / hmax;
        const size_t rows = (comp_h + 7) / 8;
        const size_t cols = (comp_w + 7) / 8;
        auto& data = grids[m].blocks.mutable_data();
        for (size_t x = 0; x < rows; ++x) {
          for (size_t y = 0; y < cols; ++y) {
            DecodeBlock(bits, &data[(x * frame[m].cols + y) * kBlockArea],
                        predictor[0], dc_tables[td[0]], ac_tables[ta[0]]);
          }
        }
      } else {
        const size_t mcu_rows = frame[0].rows / frame[0].v;
        const size_t mcu_cols = frame[0].cols / frame[0].h;
        for (size_t mr = 0; mr < mcu_rows; ++mr) {
          for (size_t mc = 0; mc < mcu_cols; ++mc) {
            for (size_t i = 0; i < ns; ++i) {
              const auto& fc = frame[members[i]];
              auto& data = grids[members[i]].blocks.mutable_data();
              for (int v = 0; v < fc.v; ++v) {
                for (int h = 0; h < fc.h; ++h) {
                  const size_t x = mr * fc.v + v;
                  const size_t y = mc * fc.h + h;
                  DecodeBlock(bits, &data[(x * fc.cols + y) * kBlockArea],
                              predictor[i], dc_tables[td[i]], ac_tables[ta[i]]);
                }
              }
            }
          }
        }
      }
      // Skip to the next marker.
      while (true) {
        if (in.AtEnd()) Truncated("missing EOI marker");
        const size_t at = in.pos();
        if (stream[at] == 0xFF && at + 1 < stream.size() &&
            stream[at + 1] != 0x00) {
          break;
        }
        in.Seek(at + 1);
      }
      continue;
    }
    // APPn, COM and any other segment: skip.
    (void)kCom;
    in.Seek(end);
  }

  if (frame.empty()) Malformed("no frame header");
  JpegData out;
  out.height = height;
  out.width = width;
  out.subsampling = mode;
  for (size_t c = 0; c < frame.size(); ++c) {
    if (!frame[c].scanned) Truncated("component " + std::to_string(c) + " has no scan");
    out.quantization.push_back(*frame[c].table);
  }
  out.components = std::move(grids);
  return out;
}

}  // namespace jpegspace
