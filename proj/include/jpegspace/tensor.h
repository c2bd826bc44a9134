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

// Dense tensors with named axes, and label-driven contraction.
//
// A LabeledTensor stores doubles in row-major order over an ordered list of
// axes. Every operation aligns operands by axis label, never by position, and
// nothing broadcasts: two tensors combine only when their labels say exactly
// how. Contract() follows the summation convention: any label that appears in
// an input but not in the requested output is summed out.

#ifndef JPEGSPACE_TENSOR_H_
#define JPEGSPACE_TENSOR_H_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace jpegspace {

struct Axis {
  std::string label;
  size_t extent = 1;

  bool operator==(const Axis& other) const = default;
};

class LabeledTensor {
 public:
  // Rank-0 tensor holding 0.
  LabeledTensor();
  // Zero-filled tensor.
  explicit LabeledTensor(std::vector<Axis> axes);
  LabeledTensor(std::vector<Axis> axes, std::vector<double> data);

  static LabeledTensor Scalar(double value);

  const std::vector<Axis>& axes() const { return axes_; }
  size_t rank() const { return axes_.size(); }
  size_t size() const { return data_.size(); }

  bool HasAxis(std::string_view label) const;
  // Position of `label` in axes(); throws if absent.
  size_t AxisIndex(std::string_view label) const;
  size_t Extent(std::string_view label) const;
  std::vector<std::string> Labels() const;
  std::vector<size_t> Strides() const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

  template <typename... Index>
  double& at(Index... index) {
    return data_[Offset(
        std::array<size_t, sizeof...(Index)>{static_cast<size_t>(index)...})];
  }
  template <typename... Index>
  double at(Index... index) const {
    return data_[Offset(
        std::array<size_t, sizeof...(Index)>{static_cast<size_t>(index)...})];
  }
  double scalar() const;

  // Same data viewed in a new axis order; `order` must be a permutation of
  // Labels().
  LabeledTensor Permuted(const std::vector<std::string>& order) const;
  // Renames one axis. The new label must not collide with another axis.
  LabeledTensor Relabeled(std::string_view from, std::string to) const;
  LabeledTensor Relabeled(
      const std::vector<std::pair<std::string, std::string>>& renames) const;

  double MaxAbs() const;

 private:
  template <size_t N>
  size_t Offset(const std::array<size_t, N>& index) const {
    CheckIndexRank(N);
    size_t offset = 0;
    for (size_t i = 0; i < N; ++i) offset = offset * axes_[i].extent + index[i];
    return offset;
  }
  void CheckIndexRank(size_t n) const;
  void Validate() const;

  std::vector<Axis> axes_;
  std::vector<double> data_;
};

// Sums over every label not listed in `output_axes`; labels present in both
// inputs and in the output act as batch (elementwise) axes. Labels shared by
// `a` and `b` must have equal extents, and every output label must occur in
// at least one input.
LabeledTensor Contract(const LabeledTensor& a, const LabeledTensor& b,
                       const std::vector<std::string>& output_axes);

struct Fold {
  std::string new_label;
  std::vector<std::string> old_labels;
};

// Merges runs of adjacent axes into single axes. Each `old_labels` list must
// name contiguous axes in their stored order. The data buffer is untouched.
LabeledTensor ReshapeFold(const LabeledTensor& t, const std::vector<Fold>& folds);

// Splits axis `label` into `axes` (extents must multiply to its extent).
LabeledTensor ReshapeUnfold(const LabeledTensor& t, std::string_view label,
                            const std::vector<Axis>& axes);

enum class ElementwiseOp { kAdd, kSub, kMul };

// Operands must have identical axes (labels, extents and order).
LabeledTensor Elementwise(const LabeledTensor& t, const LabeledTensor& u,
                          ElementwiseOp op);

LabeledTensor Scale(const LabeledTensor& t, double factor);

// max |t - u| over identically shaped tensors.
double MaxAbsDifference(const LabeledTensor& t, const LabeledTensor& u);

}  // namespace jpegspace

#endif  // JPEGSPACE_TENSOR_H_
