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

// Shannon entropy, Huffman codes and idealised arithmetic coding over a
// static symbol model.

#ifndef JPEGSPACE_ENTROPY_H_
#define JPEGSPACE_ENTROPY_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jpegspace {

struct SymbolProbability {
  int symbol = 0;
  double probability = 0.0;
};

// Ordered symbols with probabilities in (0, 1] summing to 1 (within 1e-9).
class SymbolModel {
 public:
  explicit SymbolModel(std::vector<SymbolProbability> symbols);

  // Symbols named by the characters of `names`, in order.
  static SymbolModel FromChars(std::string_view names,
                               const std::vector<double>& probabilities);

  const std::vector<SymbolProbability>& symbols() const { return symbols_; }
  size_t size() const { return symbols_.size(); }
  // Throws kInvalidArgument for symbols outside the model.
  size_t IndexOf(int symbol) const;

 private:
  std::vector<SymbolProbability> symbols_;
};

// Bits per symbol: -sum p log2 p.
double Entropy(const SymbolModel& model);

struct HuffmanNode {
  double probability = 0.0;
  int symbol = -1;  // leaves only
  int left = -1;    // internal nodes only
  int right = -1;

  bool is_leaf() const { return left < 0; }
};

// Code tree; walking left emits 0 and right emits 1.
class HuffmanTree {
 public:
  HuffmanTree(std::vector<HuffmanNode> nodes, int root);

  const std::vector<HuffmanNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  size_t leaf_count() const;

  const std::map<int, std::string>& codes() const { return codes_; }
  const std::string& CodeFor(int symbol) const;
  double AverageLength(const SymbolModel& model) const;

 private:
  std::vector<HuffmanNode> nodes_;
  int root_;
  std::map<int, std::string> codes_;
};

// Greedy Huffman construction. Merge order ties are broken by insertion
// sequence, so the tree is deterministic. Leaves are laid out canonically
// (shorter codes first, then model order), which yields the same code lengths
// as the merge tree. Requires at least two symbols.
HuffmanTree HuffmanBuild(const SymbolModel& model);

// Bitstrings are strings of '0' / '1'.
std::string HuffmanEncode(const HuffmanTree& tree, std::span<const int> message);
std::vector<int> HuffmanDecode(const HuffmanTree& tree, std::string_view bits,
                               size_t count);

// Longest message the arithmetic coder accepts.
inline constexpr size_t kMaxArithmeticSymbols = 64;

struct ArithmeticStep {
  int symbol = 0;
  double low = 0.0;
  double high = 0.0;
};

// Final interval [low, high) of an arithmetic-coded message. The coder works
// in exact rational arithmetic; the doubles here are rounded for display,
// while the *_exact strings are exact decimal expansions truncated to
// `digits` places.
struct ArithmeticCode {
  double low = 0.0;
  double high = 1.0;
  // Shortest decimal fraction inside [low, high).
  std::string emitted;
  double emitted_value = 0.0;
  size_t count = 0;
  std::vector<ArithmeticStep> steps;
};

ArithmeticCode ArithEncode(const SymbolModel& model,
                           std::span<const int> message);

// Decodes `count` symbols from a decimal string such as "0.295". The value
// must lie in [0, 1).
std::vector<int> ArithDecode(const SymbolModel& model, std::string_view value,
                             size_t count);
std::vector<int> ArithDecode(const SymbolModel& model, double value,
                             size_t count);

// Convenience for char-named models.
std::vector<int> CharsToSymbols(std::string_view text);
std::string SymbolsToChars(std::span<const int> symbols);

}  // namespace jpegspace

#endif  // JPEGSPACE_ENTROPY_H_
