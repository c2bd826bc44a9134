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

#include "jpegspace/entropy.h"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational ParseDecimal(std::string_view text) {
  cpp_int numerator = 0;
  cpp_int denominator = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      numerator = numerator * 10 + (c - '0');
      if (seen_point) denominator *= 10;
      seen_digit = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "not a non-negative decimal: '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) {
    throw Error(ErrorCode::kInvalidArgument, "empty decimal value");
  }
  return cpp_rational(numerator, denominator);
}

// The shortest decimal that round-trips to `value`, as an exact rational,
// so 0.4 means 2/5 rather than its binary neighbour.
cpp_rational DecimalRational(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific);
  const std::string_view text(buf, res.ptr - buf);
  const size_t e = text.find('e');
  cpp_rational r = ParseDecimal(text.substr(0, e));
  const int exponent = std::stoi(std::string(text.substr(e + 1)));
  cpp_rational ten_power(cpp_int(1));
  for (int i = 0; i < std::abs(exponent); ++i) ten_power *= 10;
  if (exponent >= 0) return r * ten_power;
  return r / ten_power;
}

double ToDouble(const cpp_rational& r) { return r.convert_to<double>(); }

// Cumulative bounds [lower_i, lower_i + p_i) for each symbol, normalised so
// the partition covers [0, 1) exactly.
struct Partition {
  std::vector<cpp_rational> lower;
  std::vector<cpp_rational> width;
};

Partition BuildPartition(const SymbolModel& model) {
  Partition part;
  cpp_rational total = 0;
  std::vector<cpp_rational> raw;
  for (const auto& s : model.symbols()) {
    raw.push_back(DecimalRational(s.probability));
    total += raw.back();
  }
  cpp_rational running = 0;
  for (const auto& p : raw) {
    part.lower.push_back(running);
    part.width.push_back(p / total);
    running += p / total;
  }
  return part;
}

void AssignCodes(const std::vector<HuffmanNode>& nodes, int index,
                 const std::string& prefix, std::map<int, std::string>& out) {
  const HuffmanNode& node = nodes[index];
  if (node.is_leaf()) {
    out[node.symbol] = prefix;
    return;
  }
  AssignCodes(nodes, node.left, prefix + "0", out);
  AssignCodes(nodes, node.right, prefix + "1", out);
}

void Depths(const std::vector<HuffmanNode>& nodes, int index, size_t depth,
            std::map<int, size_t>& out) {
  const HuffmanNode& node = nodes[index];
  if (node.is_leaf()) {
    out[node.symbol] = depth;
    return;
  }
  Depths(nodes, node.left, depth + 1, out);
  Depths(nodes, node.right, depth + 1, out);
}

double FillProbabilities(std::vector<HuffmanNode>& nodes, int index) {
  HuffmanNode& node = nodes[index];
  if (node.is_leaf()) return node.probability;
  const double p =
      FillProbabilities(nodes, node.left) + FillProbabilities(nodes, node.right);
  nodes[index].probability = p;
  return p;
}

}  // namespace

SymbolModel::SymbolModel(std::vector<SymbolProbability> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "symbol model is empty");
  }
  std::set<int> ids;
  double total = 0.0;
  for (const auto& s : symbols_) {
    if (!(s.probability > 0.0 && s.probability <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "symbol probability outside (0, 1]");
    }
    if (!ids.insert(s.symbol).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate symbol id");
    }
    total += s.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "symbol probabilities sum to " + std::to_string(total));
  }
}

SymbolModel SymbolModel::FromChars(std::string_view names,
                                   const std::vector<double>& probabilities) {
  if (names.size() != probabilities.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "symbol names and probabilities differ in length");
  }
  std::vector<SymbolProbability> symbols;
  for (size_t i = 0; i < names.size(); ++i) {
    symbols.push_back({static_cast<unsigned char>(names[i]), probabilities[i]});
  }
  return SymbolModel(std::move(symbols));
}

size_t SymbolModel::IndexOf(int symbol) const {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].symbol == symbol) return i;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "symbol " + std::to_string(symbol) + " not in model");
}

double Entropy(const SymbolModel& model) {
  double h = 0.0;
  for (const auto& s : model.symbols()) h -= s.probability * std::log2(s.probability);
  return h;
}

HuffmanTree::HuffmanTree(std::vector<HuffmanNode> nodes, int root)
    : nodes_(std::move(nodes)), root_(root) {
  AssignCodes(nodes_, root_, "", codes_);
}

size_t HuffmanTree::leaf_count() const {
  return std::count_if(nodes_.begin(), nodes_.end(),
                       [](const HuffmanNode& n) { return n.is_leaf(); });
}

const std::string& HuffmanTree::CodeFor(int symbol) const {
  auto it = codes_.find(symbol);
  if (it == codes_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "symbol " + std::to_string(symbol) + " not in Huffman tree");
  }
  return it->second;
}

double HuffmanTree::AverageLength(const SymbolModel& model) const {
  double average = 0.0;
  for (const auto& s : model.symbols()) {
    average += s.probability * static_cast<double>(CodeFor(s.symbol).size());
  }
  return average;
}

HuffmanTree HuffmanBuild(const SymbolModel& model) {
  if (model.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Huffman coding needs at least two symbols");
  }
  // Greedy merge: pop the two lightest nodes, push their parent.
  std::vector<HuffmanNode> merge_nodes;
  using Entry = std::tuple<double, size_t, int>;  // probability, seq, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  size_t seq = 0;
  for (const auto& s : model.symbols()) {
    merge_nodes.push_back({s.probability, s.symbol, -1, -1});
    queue.emplace(s.probability, seq++, static_cast<int>(merge_nodes.size()) - 1);
  }
  while (queue.size() > 1) {
    const auto [pl, sl, left] = queue.top();
    queue.pop();
    const auto [pr, sr, right] = queue.top();
    queue.pop();
    merge_nodes.push_back({pl + pr, -1, left, right});
    queue.emplace(pl + pr, seq++, static_cast<int>(merge_nodes.size()) - 1);
  }
  std::map<int, size_t> lengths;
  Depths(merge_nodes, std::get<2>(queue.top()), 0, lengths);

  // Canonical layout: order leaves by (length, model order) and hand out
  // consecutive codes, as JPEG does for its tables.
  std::vector<size_t> order(model.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return lengths[model.symbols()[a].symbol] <
           lengths[model.symbols()[b].symbol];
  });
  std::vector<HuffmanNode> nodes(1);  // root
  uint64_t code = 0;
  size_t previous_length = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const auto& s = model.symbols()[order[rank]];
    const size_t length = lengths[s.symbol];
    if (rank > 0) code = (code + 1) << (length - previous_length);
    previous_length = length;
    int node = 0;
    for (size_t bit = length; bit-- > 0;) {
      const bool right = (code >> bit) & 1u;
      int& child = right ? nodes[node].right : nodes[node].left;
      if (child < 0) {
        child = static_cast<int>(nodes.size());
        nodes.push_back({});
      }
      node = right ? nodes[node].right : nodes[node].left;
    }
    nodes[node].symbol = s.symbol;
    nodes[node].probability = s.probability;
  }
  FillProbabilities(nodes, 0);
  return HuffmanTree(std::move(nodes), 0);
}

std::string HuffmanEncode(const HuffmanTree& tree,
                          std::span<const int> message) {
  std::string bits;
  for (int symbol : message) bits += tree.CodeFor(symbol);
  return bits;
}

std::vector<int> HuffmanDecode(const HuffmanTree& tree, std::string_view bits,
                               size_t count) {
  std::vector<int> message;
  message.reserve(count);
  const auto& nodes = tree.nodes();
  size_t pos = 0;
  while (message.size() < count) {
    int node = tree.root();
    while (!nodes[node].is_leaf()) {
      if (pos >= bits.size()) {
        throw Error(ErrorCode::kTruncatedStream,
                    "bitstring ended after " + std::to_string(message.size()) +
                        " of " + std::to_string(count) + " symbols");
      }
      const char bit = bits[pos++];
      if (bit != '0' && bit != '1') {
        throw Error(ErrorCode::kInvalidArgument, "bitstring holds non-bit");
      }
      node = bit == '0' ? nodes[node].left : nodes[node].right;
      if (node < 0) {
        throw Error(ErrorCode::kMalformedStream, "bit path leaves the tree");
      }
    }
    message.push_back(nodes[node].symbol);
  }
  return message;
}

ArithmeticCode ArithEncode(const SymbolModel& model,
                           std::span<const int> message) {
  if (message.size() > kMaxArithmeticSymbols) {
    throw Error(ErrorCode::kOutOfRange,
                "arithmetic coder limited to " +
                    std::to_string(kMaxArithmeticSymbols) + " symbols");
  }
  const Partition part = BuildPartition(model);
  cpp_rational low = 0;
  cpp_rational width = 1;
  ArithmeticCode code;
  code.count = message.size();
  for (int symbol : message) {
    const size_t i = model.IndexOf(symbol);
    low += width * part.lower[i];
    width *= part.width[i];
    code.steps.push_back({symbol, ToDouble(low), ToDouble(low + width)});
  }
  const cpp_rational high = low + width;
  code.low = ToDouble(low);
  code.high = ToDouble(high);

  // Shortest decimal d with low <= d < high.
  cpp_int scale = 1;
  for (size_t digits = 0;; ++digits, scale *= 10) {
    const cpp_rational scaled = low * scale;
    cpp_int candidate = numerator(scaled) / denominator(scaled);
    if (cpp_rational(candidate) < scaled) candidate += 1;
    if (cpp_rational(candidate, scale) < high) {
      std::string digits_text = candidate.str();
      if (digits == 0) {
        code.emitted = digits_text;
      } else {
        if (digits_text.size() < digits) {
          digits_text.insert(0, digits - digits_text.size(), '0');
        }
        code.emitted = "0." + digits_text;
      }
      code.emitted_value = ToDouble(cpp_rational(candidate, scale));
      break;
    }
  }
  return code;
}

std::vector<int> ArithDecode(const SymbolModel& model, std::string_view value,
                             size_t count) {
  if (count == 0 || count > kMaxArithmeticSymbols) {
    throw Error(ErrorCode::kOutOfRange,
                "decode count must be in [1, " +
                    std::to_string(kMaxArithmeticSymbols) + "]");
  }
  const cpp_rational q = ParseDecimal(value);
  if (q >= 1) {
    throw Error(ErrorCode::kOutOfRange,
                "arithmetic code value outside [0, 1): " + std::string(value));
  }
  const Partition part = BuildPartition(model);
  cpp_rational low = 0;
  cpp_rational width = 1;
  std::vector<int> message;
  for (size_t n = 0; n < count; ++n) {
    for (size_t i = 0; i < model.size(); ++i) {
      const cpp_rational lo = low + width * part.lower[i];
      const cpp_rational hi = lo + width * part.width[i];
      if (q >= lo && q < hi) {
        message.push_back(model.symbols()[i].symbol);
        low = lo;
        width *= part.width[i];
        break;
      }
    }
  }
  return message;
}

std::vector<int> ArithDecode(const SymbolModel& model, double value,
                             size_t count) {
  if (!(value >= 0.0 && value < 1.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "arithmetic code value outside [0, 1)");
  }
  // Shortest round-trip decimal, consistent with how probabilities are read.
  char buf[400];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  const std::string text(buf, res.ptr);
  return ArithDecode(model, std::string_view(text), count);
}

std::vector<int> CharsToSymbols(std::string_view text) {
  std::vector<int> out;
  for (char c : text) out.push_back(static_cast<unsigned char>(c));
  return out;
}

std::string SymbolsToChars(std::span<const int> symbols) {
  std::string out;
  for (int s : symbols) out += static_cast<char>(s);
  return out;
}

}  // namespace jpegspace
