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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"

namespace jpegspace {
namespace {

SymbolModel WorkedModel() {
  return SymbolModel::FromChars("ABCD", {0.4, 0.35, 0.2, 0.05});
}

SymbolModel RandomModel(size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) total += (v = u(rng));
  std::vector<SymbolProbability> s;
  for (size_t i = 0; i < n; ++i) s.push_back({static_cast<int>(i), w[i] / total});
  return SymbolModel(s);
}

TEST(EntropyTest, WorkedExample) {
  EXPECT_NEAR(Entropy(WorkedModel()), 1.74, 0.005);
}

TEST(EntropyTest, CertainSymbolHasNoEntropy) {
  EXPECT_EQ(Entropy(SymbolModel({{0, 1.0}})), 0.0);
}

TEST(EntropyTest, UniformOverFourIsTwoBits) {
  EXPECT_DOUBLE_EQ(Entropy(SymbolModel::FromChars("ABCD", {0.25, 0.25, 0.25, 0.25})),
                   2.0);
}

TEST(EntropyTest, UniformIsMaximal) {
  std::mt19937_64 rng(1);
  for (size_t n : {2u, 5u, 8u}) {
    const double bound = std::log2(static_cast<double>(n));
    for (int trial = 0; trial < 10000 / 3; ++trial) {
      EXPECT_LE(Entropy(RandomModel(n, rng)), bound + 1e-12);
    }
  }
}

TEST(EntropyTest, RejectsInvalidModels) {
  EXPECT_JS_ERROR(SymbolModel({{0, 0.5}, {1, 0.4}}), ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(SymbolModel({{0, 0.5}, {0, 0.5}}), ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(SymbolModel({{0, 1.5}, {1, -0.5}}), ErrorCode::kInvalidArgument);
}

TEST(HuffmanTest, WorkedExampleCodes) {
  const SymbolModel model = WorkedModel();
  const HuffmanTree tree = HuffmanBuild(model);
  EXPECT_EQ(tree.CodeFor('A').size(), 1u);
  EXPECT_EQ(tree.CodeFor('B').size(), 2u);
  EXPECT_EQ(tree.CodeFor('C').size(), 3u);
  EXPECT_EQ(tree.CodeFor('D').size(), 3u);
  EXPECT_NEAR(tree.AverageLength(model), 1.85, 1e-12);
  const std::vector<int> a = {'A'};
  const std::vector<int> d = {'D'};
  EXPECT_EQ(HuffmanEncode(tree, a), "0");
  EXPECT_EQ(HuffmanEncode(tree, d), "111");
}

TEST(HuffmanTest, EqualProbabilitiesGiveBalancedTree) {
  const HuffmanTree tree =
      HuffmanBuild(SymbolModel::FromChars("ABCD", {0.25, 0.25, 0.25, 0.25}));
  for (const auto& [symbol, code] : tree.codes()) EXPECT_EQ(code.size(), 2u);
}

TEST(HuffmanTest, NoiselessCodingBound) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const SymbolModel model = RandomModel(8, rng);
    const double h = Entropy(model);
    const double len = HuffmanBuild(model).AverageLength(model);
    EXPECT_GE(len, h - 1e-12);
    EXPECT_LE(len, h + 1.0);
  }
}

TEST(HuffmanTest, TreeInvariantsAndPrefixFreedom) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const SymbolModel model = RandomModel(2 + trial % 12, rng);
    const HuffmanTree tree = HuffmanBuild(model);
    EXPECT_EQ(tree.leaf_count(), model.size());
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) continue;
      EXPECT_NEAR(node.probability,
                  tree.nodes()[node.left].probability +
                      tree.nodes()[node.right].probability,
                  1e-12);
    }
    for (const auto& [s1, c1] : tree.codes()) {
      for (const auto& [s2, c2] : tree.codes()) {
        if (s1 == s2) continue;
        EXPECT_NE(c2.compare(0, c1.size(), c1), 0) << c1 << " prefixes " << c2;
      }
    }
  }
}

TEST(HuffmanTest, RandomMessagesRoundTrip) {
  std::mt19937_64 rng(4);
  const SymbolModel model = RandomModel(6, rng);
  const HuffmanTree tree = HuffmanBuild(model);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> message(1000);
    for (int& s : message) s = pick(rng);
    const std::string bits = HuffmanEncode(tree, message);
    EXPECT_EQ(HuffmanDecode(tree, bits, message.size()), message);
  }
}

TEST(HuffmanTest, Errors) {
  const HuffmanTree tree = HuffmanBuild(WorkedModel());
  const std::vector<int> unknown = {'Z'};
  EXPECT_JS_ERROR(HuffmanEncode(tree, unknown), ErrorCode::kInvalidArgument);
  EXPECT_JS_ERROR(HuffmanDecode(tree, "11", 1), ErrorCode::kTruncatedStream);
  EXPECT_JS_ERROR(HuffmanBuild(SymbolModel({{0, 1.0}})), ErrorCode::kInvalidArgument);
}

TEST(ArithmeticTest, WorkedExampleInterval) {
  const SymbolModel model = WorkedModel();
  const ArithmeticCode code = ArithEncode(model, CharsToSymbols("ABD"));
  // Exact interval is [0.293, 0.3); two decimals give [0.29, 0.30).
  EXPECT_NEAR(code.low, 0.293, 1e-15);
  EXPECT_NEAR(code.high, 0.3, 1e-15);
  EXPECT_NEAR(code.low, 0.29, 0.005);
  EXPECT_GE(code.emitted_value, code.low);
  EXPECT_LT(code.emitted_value, code.high);
  EXPECT_EQ(SymbolsToChars(ArithDecode(model, "0.295", 3)), "ABD");
  EXPECT_EQ(SymbolsToChars(ArithDecode(model, 0.295, 3)), "ABD");
  EXPECT_EQ(SymbolsToChars(ArithDecode(model, code.emitted, 3)), "ABD");
}

TEST(ArithmeticTest, IntervalsNest) {
  std::mt19937_64 rng(5);
  const SymbolModel model = RandomModel(5, rng);
  std::uniform_int_distribution<int> pick(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> message(1 + trial % 20);
    for (int& s : message) s = pick(rng);
    const ArithmeticCode code = ArithEncode(model, message);
    double low = 0.0, high = 1.0;
    for (const auto& step : code.steps) {
      const double p = model.symbols()[model.IndexOf(step.symbol)].probability;
      EXPECT_GE(step.low, low - 1e-15);
      EXPECT_LE(step.high, high + 1e-15);
      EXPECT_NEAR(step.high - step.low, (high - low) * p, 1e-12);
      low = step.low;
      high = step.high;
    }
    EXPECT_EQ(ArithDecode(model, code.emitted, message.size()), message);
  }
}

TEST(ArithmeticTest, SingleSymbolAlphabetKeepsUnitInterval) {
  const SymbolModel model({{7, 1.0}});
  const std::vector<int> message(10, 7);
  const ArithmeticCode code = ArithEncode(model, message);
  EXPECT_EQ(code.low, 0.0);
  EXPECT_EQ(code.high, 1.0);
}

TEST(ArithmeticTest, Errors) {
  const SymbolModel model = WorkedModel();
  EXPECT_JS_ERROR(ArithDecode(model, 1.0, 3), ErrorCode::kOutOfRange);
  EXPECT_JS_ERROR(ArithDecode(model, "1.5", 3), ErrorCode::kOutOfRange);
  const std::vector<int> too_long(kMaxArithmeticSymbols + 1, 'A');
  EXPECT_JS_ERROR(ArithEncode(model, too_long), ErrorCode::kOutOfRange);
}

}  // namespace
}  // namespace jpegspace
