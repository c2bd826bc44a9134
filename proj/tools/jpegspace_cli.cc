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

// Exit codes: 0 success, 1 verification failure, 2 usage, 3 IO or parse.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jpegspace/bench.h"
#include "jpegspace/entropy.h"
#include "jpegspace/error.h"
#include "jpegspace/image_io.h"
#include "jpegspace/jdr_ops.h"
#include "jpegspace/jfif.h"
#include "jpegspace/jpeg_codec.h"
#include "jpegspace/jpeg_linear.h"
#include "jpegspace/netspec.h"
#include "jpegspace/sidecar.h"
#include "jpegspace/verify.h"

namespace jpegspace {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

enum class Format { kText, kCsv };

struct RunConfig {
  std::string input;
  std::string out;
  std::string reference;
  std::string container = "auto";
  int quality = 75;
  std::string subsample = "420";
  int m = kMaxReluFrequency;
  uint64_t seed = 1;
  size_t blocks = 100000;
  size_t reps = 5;
  size_t count = 100;
  size_t channels = 2;
  std::vector<size_t> sizes;
  std::string format = "text";
  std::string probabilities = "0.4,0.35,0.2,0.05";
  std::string message = "ABD";
  std::string map_kind = "compress";
  bool inject_fault = false;
  bool nearest = false;

  Format fmt() const { return format == "csv" ? Format::kCsv : Format::kText; }
};

// stdout, or the --out file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::kIo, "cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void Close() {
    if (file_) {
      file_->close();
      if (!*file_) throw Error(ErrorCode::kIo, "write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void CsvHeader(std::ostream& os, const std::string& command,
               const std::string& columns) {
  os << "# jpegspace-csv v1 " << command << "\n" << columns << "\n";
}

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific << v;
  return os.str();
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int CmdEncode(const RunConfig& c) {
  const Image image = ReadPnm(c.input);
  const Subsampling mode = c.subsample == "444" ? Subsampling::k444 : Subsampling::k420;
  const bool sidecar =
      c.container == "sidecar" || (c.container == "auto" && EndsWith(c.out, ".jscf"));
  const JpegData data = Compress(image, c.quality, mode);
  const std::vector<uint8_t> bytes =
      sidecar ? SerializeCoefficients(data) : JfifSerialize(data);
  WriteFileBytes(c.out, bytes);
  std::cout << "wrote " << c.out << " (" << bytes.size() << " bytes, "
            << image.width << "x" << image.height << ", quality " << c.quality
            << ", " << c.subsample << ")\n";
  return kExitOk;
}

int CmdDecode(const RunConfig& c) {
  const std::vector<uint8_t> bytes = ReadFileBytes(c.input);
  const ChromaUpsampling up =
      c.nearest ? ChromaUpsampling::kNearest : ChromaUpsampling::kBilinear;
  const bool sidecar = bytes.size() >= 4 && bytes[0] == 'J' && bytes[1] == 'S' &&
                       bytes[2] == 'C' && bytes[3] == 'F';
  const Image image =
      sidecar ? Decompress(ParseCoefficients(bytes), up) : Decode(bytes, up);
  WritePnm(c.out, image);
  std::cout << "wrote " << c.out << " (" << image.width << "x" << image.height
            << ", " << image.channels << " channel(s))\n";
  if (!c.reference.empty()) {
    const double psnr = Psnr(ReadPnm(c.reference), image);
    std::cout << "psnr_db " << (std::isinf(psnr) ? std::string("inf") : Num(psnr))
              << "\n";
  }
  return kExitOk;
}

int CmdVerify(const RunConfig& c) {
  VerifyOptions options;
  options.seed = c.seed;
  options.inject_fault = c.inject_fault;
  if (!c.sizes.empty()) options.sizes = c.sizes;
  const VerifyReport report = RunVerify(options);
  Output out(c.out);
  auto& os = out.stream();
  if (c.fmt() == Format::kCsv) {
    CsvHeader(os, "verify", "check,deviation,tolerance,passed");
    for (const auto& r : report.checks) {
      os << r.name << "," << Num(r.deviation) << "," << Num(r.tolerance) << ","
         << (r.passed ? 1 : 0) << "\n";
    }
  } else {
    for (const auto& r : report.checks) {
      os << (r.passed ? "PASS " : "FAIL ") << r.name << "  deviation "
         << Num(r.deviation) << "  tolerance " << Num(r.tolerance) << "\n";
    }
    os << (report.passed() ? "all checks passed" : "verification FAILED") << "\n";
  }
  out.Close();
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int CmdReluSweep(const RunConfig& c) {
  const auto rows = ReluSweep(c.blocks, c.seed);
  Output out(c.out);
  auto& os = out.stream();
  if (c.fmt() == Format::kCsv) {
    CsvHeader(os, "relu-sweep blocks=" + std::to_string(c.blocks) +
                      " seed=" + std::to_string(c.seed),
              "m,rmse_asm,rmse_naive");
  } else {
    os << "m   rmse_asm      rmse_naive\n";
  }
  for (const auto& r : rows) {
    if (c.fmt() == Format::kCsv) {
      os << r.m << "," << Num(r.rmse_asm) << "," << Num(r.rmse_naive) << "\n";
    } else {
      char line[96];
      std::snprintf(line, sizeof(line), "%-3d %.6e  %.6e\n", r.m, r.rmse_asm,
                    r.rmse_naive);
      os << line;
    }
  }
  out.Close();
  return kExitOk;
}

int CmdBench(const RunConfig& c) {
  BenchOptions options;
  options.reps = c.reps;
  options.seed = c.seed;
  if (!c.sizes.empty()) options.sizes = c.sizes;
  const auto rows = RunBench(options);
  Output out(c.out);
  auto& os = out.stream();
  if (c.fmt() == Format::kCsv) {
    CsvHeader(os, "bench", "name,size,reps,blocks,median_seconds,blocks_per_second");
  } else {
    os << "name           size  blocks  median_s      blocks/s\n";
  }
  for (const auto& r : rows) {
    if (c.fmt() == Format::kCsv) {
      os << r.name << "," << r.size << "," << r.reps << "," << r.blocks << ","
         << Num(r.median_seconds) << "," << Num(r.blocks_per_second) << "\n";
    } else {
      char line[128];
      std::snprintf(line, sizeof(line), "%-14s %4zu  %6zu  %.4e  %.4e\n",
                    r.name.c_str(), r.size, r.blocks, r.median_seconds,
                    r.blocks_per_second);
      os << line;
    }
  }
  out.Close();
  return kExitOk;
}

std::vector<double> ParseProbabilities(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad probability '" + item + "'");
    }
  }
  return out;
}

int CmdEntropy(const RunConfig& c) {
  const std::vector<double> probs = ParseProbabilities(c.probabilities);
  if (probs.size() > 26) {
    throw Error(ErrorCode::kInvalidArgument, "at most 26 symbols (A..Z)");
  }
  const std::string names = std::string("ABCDEFGHIJKLMNOPQRSTUVWXYZ").substr(0, probs.size());
  const SymbolModel model = SymbolModel::FromChars(names, probs);
  const std::vector<int> message = CharsToSymbols(c.message);

  Output out(c.out);
  auto& os = out.stream();
  const bool csv = c.fmt() == Format::kCsv;
  if (csv) CsvHeader(os, "entropy", "key,value");
  auto kv = [&](const std::string& k, const std::string& v) {
    os << k << (csv ? "," : "  ") << v << "\n";
  };
  kv("entropy_bits", Num(Entropy(model)));
  if (model.size() >= 2) {
    const HuffmanTree tree = HuffmanBuild(model);
    for (const auto& [symbol, code] : tree.codes()) {
      kv(std::string("code_") + static_cast<char>(symbol), code);
    }
    kv("average_length", Num(tree.AverageLength(model)));
    if (!message.empty()) kv("huffman_bits", HuffmanEncode(tree, message));
  }
  if (!message.empty()) {
    const ArithmeticCode code = ArithEncode(model, message);
    kv("interval_low", Num(code.low));
    kv("interval_high", Num(code.high));
    kv("emitted", code.emitted);
    kv("decoded", SymbolsToChars(ArithDecode(model, code.emitted, code.count)));
  }
  out.Close();
  return kExitOk;
}

int CmdDeviation(const RunConfig& c) {
  const size_t edge = c.sizes.empty() ? 32 : c.sizes.front();
  const NetworkSpec spec = MakeToyNetwork(c.channels, 10, edge, edge, c.seed);
  const auto inputs = RandomInputs(spec, c.count, c.seed + 1);
  const DeviationReport report = Deviation(spec, inputs, QuantizationMatrix(), c.m);
  Output out(c.out);
  auto& os = out.stream();
  if (c.fmt() == Format::kCsv) {
    CsvHeader(os, "deviation", "size,channels,inputs,m,max_abs,mean_abs");
    os << edge << "," << c.channels << "," << c.count << "," << c.m << ","
       << Num(report.max_abs) << "," << Num(report.mean_abs) << "\n";
  } else {
    os << "max_abs  " << Num(report.max_abs) << "\nmean_abs " << Num(report.mean_abs)
       << "\n";
  }
  out.Close();
  return kExitOk;
}

int CmdMap(const RunConfig& c) {
  if (c.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  const size_t edge = c.sizes.empty() ? 8 : c.sizes.front();
  const QuantizationMatrix q = QualityToMatrix(c.quality, PlaneKind::kLuma);
  LabeledTensor tensor;
  if (c.map_kind == "compress" || c.map_kind == "decompress") {
    const JpegMaps maps = ComposeJpeg(edge, edge, q);
    tensor = c.map_kind == "compress" ? maps.compress.tensor
                                      : maps.decompress.tensor;
  } else {
    tensor = GetMaskMap().psi;
  }
  const auto bytes = SerializeTensor(tensor);
  WriteFileBytes(c.out, bytes);
  std::cout << "wrote " << c.out << " (" << bytes.size() << " bytes)\n";
  return kExitOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"jpegspace: JPEG codec and coefficient-domain operators"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output path (default stdout)");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "RNG seed");
  };
  auto add_sizes = [&](CLI::App* sub) {
    sub->add_option("--sizes", c.sizes, "Image edges (multiples of 8)")
        ->delimiter(',');
  };

  auto* encode = app.add_subcommand("encode", "PPM/PGM -> JFIF or sidecar");
  encode->add_option("input", c.input)->required();
  encode->add_option("--out", c.out, "Output file")->required();
  encode->add_option("--quality", c.quality)->check(CLI::Range(1, 100));
  encode->add_option("--subsample", c.subsample)->check(CLI::IsMember({"444", "420"}));
  encode->add_option("--container", c.container)
      ->check(CLI::IsMember({"auto", "jfif", "sidecar"}));

  auto* decode = app.add_subcommand("decode", "JFIF or sidecar -> PPM/PGM");
  decode->add_option("input", c.input)->required();
  decode->add_option("--out", c.out, "Output file")->required();
  decode->add_option("--reference", c.reference, "Original image for PSNR");
  decode->add_flag("--nearest", c.nearest, "Nearest-neighbour chroma upsampling");

  auto* verify = app.add_subcommand("verify", "Coefficient vs pixel checks");
  add_seed(verify);
  add_sizes(verify);
  add_format(verify);
  add_out(verify);
  verify->add_flag("--inject-fault", c.inject_fault,
                   "Perturb exploded convolutions by 1e-3");

  auto* sweep = app.add_subcommand("relu-sweep", "ASM vs naive ReLU RMSE");
  sweep->add_option("--blocks", c.blocks)->check(CLI::PositiveNumber);
  add_seed(sweep);
  add_format(sweep);
  add_out(sweep);

  auto* bench = app.add_subcommand("bench", "Throughput comparisons");
  bench->add_option("--reps", c.reps)->check(CLI::PositiveNumber);
  add_sizes(bench);
  add_seed(bench);
  add_format(bench);
  add_out(bench);

  auto* entropy = app.add_subcommand("entropy", "Entropy, Huffman and arithmetic codes");
  entropy->add_option("--probs", c.probabilities, "Comma-separated, symbols A, B, ...");
  entropy->add_option("--message", c.message);
  add_format(entropy);
  add_out(entropy);

  auto* deviation = app.add_subcommand("deviation", "Toy network pixel vs jpeg logits");
  deviation->add_option("--m", c.m)->check(CLI::Range(0, kMaxReluFrequency));
  deviation->add_option("--count", c.count)->check(CLI::PositiveNumber);
  deviation->add_option("--channels", c.channels)->check(CLI::PositiveNumber);
  add_sizes(deviation);
  add_seed(deviation);
  add_format(deviation);
  add_out(deviation);

  auto* map = app.add_subcommand("map", "Export J, J~ or Psi as a tensor sidecar");
  map->add_option("--kind", c.map_kind)
      ->check(CLI::IsMember({"compress", "decompress", "psi"}));
  map->add_option("--quality", c.quality)->check(CLI::Range(1, 100));
  add_sizes(map);
  add_out(map);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*encode) return CmdEncode(c);
    if (*decode) return CmdDecode(c);
    if (*verify) return CmdVerify(c);
    if (*sweep) return CmdReluSweep(c);
    if (*bench) return CmdBench(c);
    if (*entropy) return CmdEntropy(c);
    if (*deviation) return CmdDeviation(c);
    if (*map) return CmdMap(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kIo:
      case ErrorCode::kTruncatedStream:
      case ErrorCode::kMalformedStream:
      case ErrorCode::kUnsupportedFeature:
        return kExitIo;
      default:
        return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace
}  // namespace jpegspace

int main(int argc, char** argv) { return jpegspace::Run(argc, argv); }
