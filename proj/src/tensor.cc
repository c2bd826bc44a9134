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

#include "jpegspace/tensor.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

size_t ProductOfExtents(const std::vector<Axis>& axes) {
  size_t n = 1;
  for (const auto& axis : axes) n *= axis.extent;
  return n;
}

std::string Describe(const std::vector<Axis>& axes) {
  std::string out = "[";
  for (size_t i = 0; i < axes.size(); ++i) {
    if (i) out += ",";
    out += axes[i].label + ":" + std::to_string(axes[i].extent);
  }
  return out + "]";
}

bool Contains(const std::vector<std::string>& labels, const std::string& l) {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

// Sums `t` over the listed labels.
LabeledTensor SumOut(const LabeledTensor& t,
                     const std::vector<std::string>& labels) {
  if (labels.empty()) return t;
  std::vector<std::string> order;
  std::vector<Axis> kept;
  for (const auto& axis : t.axes()) {
    if (!Contains(labels, axis.label)) {
      order.push_back(axis.label);
      kept.push_back(axis);
    }
  }
  size_t inner = 1;
  for (const auto& label : labels) {
    order.push_back(label);
    inner *= t.Extent(label);
  }
  const LabeledTensor permuted = t.Permuted(order);
  LabeledTensor out(kept);
  const auto& src = permuted.data();
  auto& dst = out.mutable_data();
  for (size_t row = 0; row < dst.size(); ++row) {
    double sum = 0.0;
    const double* p = src.data() + row * inner;
    for (size_t i = 0; i < inner; ++i) sum += p[i];
    dst[row] = sum;
  }
  return out;
}

}  // namespace

LabeledTensor::LabeledTensor() : data_(1, 0.0) {}

LabeledTensor::LabeledTensor(std::vector<Axis> axes)
    : axes_(std::move(axes)) {
  Validate();
  data_.assign(ProductOfExtents(axes_), 0.0);
}

LabeledTensor::LabeledTensor(std::vector<Axis> axes, std::vector<double> data)
    : axes_(std::move(axes)), data_(std::move(data)) {
  Validate();
  if (data_.size() != ProductOfExtents(axes_)) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor data length " + std::to_string(data_.size()) +
                    " does not match axes " + Describe(axes_));
  }
}

LabeledTensor LabeledTensor::Scalar(double value) {
  return LabeledTensor({}, {value});
}

void LabeledTensor::Validate() const {
  std::set<std::string> seen;
  for (const auto& axis : axes_) {
    if (axis.extent == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "axis '" + axis.label + "' has zero extent");
    }
    if (!seen.insert(axis.label).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate axis label '" + axis.label + "'");
    }
  }
}

void LabeledTensor::CheckIndexRank(size_t n) const {
  if (n != axes_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "index of rank " + std::to_string(n) + " into tensor " +
                    Describe(axes_));
  }
}

bool LabeledTensor::HasAxis(std::string_view label) const {
  return std::any_of(axes_.begin(), axes_.end(),
                     [&](const Axis& a) { return a.label == label; });
}

size_t LabeledTensor::AxisIndex(std::string_view label) const {
  for (size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].label == label) return i;
  }
  throw Error(ErrorCode::kShapeMismatch, "tensor " + Describe(axes_) +
                                             " has no axis '" +
                                             std::string(label) + "'");
}

size_t LabeledTensor::Extent(std::string_view label) const {
  return axes_[AxisIndex(label)].extent;
}

std::vector<std::string> LabeledTensor::Labels() const {
  std::vector<std::string> labels;
  labels.reserve(axes_.size());
  for (const auto& axis : axes_) labels.push_back(axis.label);
  return labels;
}

std::vector<size_t> LabeledTensor::Strides() const {
  std::vector<size_t> strides(axes_.size(), 1);
  for (size_t i = axes_.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * axes_[i].extent;
  }
  return strides;
}

double LabeledTensor::scalar() const {
  if (!axes_.empty()) {
    throw Error(ErrorCode::kShapeMismatch,
                "scalar() on tensor " + Describe(axes_));
  }
  return data_[0];
}

LabeledTensor LabeledTensor::Permuted(
    const std::vector<std::string>& order) const {
  if (order.size() != axes_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "permutation of rank " + std::to_string(order.size()) +
                    " for tensor " + Describe(axes_));
  }
  const std::vector<size_t> strides = Strides();
  std::vector<Axis> new_axes;
  std::vector<size_t> src_strides;
  bool identity = true;
  for (size_t i = 0; i < order.size(); ++i) {
    const size_t idx = AxisIndex(order[i]);
    identity = identity && idx == i;
    new_axes.push_back(axes_[idx]);
    src_strides.push_back(strides[idx]);
  }
  if (identity) return *this;

  LabeledTensor out(new_axes);
  auto& dst = out.mutable_data();
  const size_t rank = new_axes.size();
  const size_t inner_extent = new_axes[rank - 1].extent;
  const size_t inner_stride = src_strides[rank - 1];
  std::vector<size_t> counter(rank, 0);
  size_t src_base = 0;
  for (size_t d = 0; d < dst.size(); d += inner_extent) {
    const double* src = data_.data() + src_base;
    for (size_t i = 0; i < inner_extent; ++i) dst[d + i] = src[i * inner_stride];
    // Advance the multi-index over all but the innermost axis.
    for (size_t axis = rank - 1; axis-- > 0;) {
      src_base += src_strides[axis];
      if (++counter[axis] < new_axes[axis].extent) break;
      src_base -= src_strides[axis] * new_axes[axis].extent;
      counter[axis] = 0;
    }
  }
  return out;
}

LabeledTensor LabeledTensor::Relabeled(std::string_view from,
                                       std::string to) const {
  return Relabeled({{std::string(from), std::move(to)}});
}

LabeledTensor LabeledTensor::Relabeled(
    const std::vector<std::pair<std::string, std::string>>& renames) const {
  std::vector<Axis> axes = axes_;
  for (const auto& [from, to] : renames) axes[AxisIndex(from)].label = to;
  return LabeledTensor(std::move(axes), data_);
}

double LabeledTensor::MaxAbs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

LabeledTensor Contract(const LabeledTensor& a, const LabeledTensor& b,
                       const std::vector<std::string>& output_axes) {
  std::set<std::string> unique_out(output_axes.begin(), output_axes.end());
  if (unique_out.size() != output_axes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate output axis label");
  }

  std::vector<std::string> batch, contracted, free_a, free_b, sum_a, sum_b;
  for (const auto& axis : a.axes()) {
    const bool in_b = b.HasAxis(axis.label);
    const bool in_out = unique_out.count(axis.label) > 0;
    if (in_b && b.Extent(axis.label) != axis.extent) {
      throw Error(ErrorCode::kShapeMismatch,
                  "extent mismatch on shared axis '" + axis.label + "': " +
                      std::to_string(axis.extent) + " vs " +
                      std::to_string(b.Extent(axis.label)));
    }
    if (in_b) {
      (in_out ? batch : contracted).push_back(axis.label);
    } else {
      (in_out ? free_a : sum_a).push_back(axis.label);
    }
  }
  for (const auto& axis : b.axes()) {
    if (a.HasAxis(axis.label)) continue;
    (unique_out.count(axis.label) ? free_b : sum_b).push_back(axis.label);
  }
  for (const auto& label : output_axes) {
    if (!a.HasAxis(label) && !b.HasAxis(label)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "output axis '" + label + "' absent from both inputs");
    }
  }

  auto concat = [](std::initializer_list<const std::vector<std::string>*> ls) {
    std::vector<std::string> out;
    for (const auto* l : ls) out.insert(out.end(), l->begin(), l->end());
    return out;
  };
  // Operands already in GEMM order are used in place.
  auto prepare = [](const LabeledTensor& t, const std::vector<std::string>& sum,
                    const std::vector<std::string>& order,
                    LabeledTensor& storage) -> const LabeledTensor& {
    if (sum.empty() && t.Labels() == order) return t;
    storage = SumOut(t, sum).Permuted(order);
    return storage;
  };
  LabeledTensor storage_a, storage_b;
  const LabeledTensor& pa =
      prepare(a, sum_a, concat({&batch, &free_a, &contracted}), storage_a);
  const LabeledTensor& pb =
      prepare(b, sum_b, concat({&batch, &contracted, &free_b}), storage_b);

  auto extent_product = [](const LabeledTensor& t,
                           const std::vector<std::string>& labels) {
    size_t n = 1;
    for (const auto& l : labels) n *= t.Extent(l);
    return n;
  };
  const size_t nb = extent_product(pa, batch);
  const size_t m = extent_product(pa, free_a);
  const size_t k = extent_product(pa, contracted);
  const size_t n = extent_product(pb, free_b);

  std::vector<Axis> result_axes;
  for (const auto& l : batch) result_axes.push_back({l, pa.Extent(l)});
  for (const auto& l : free_a) result_axes.push_back({l, pa.Extent(l)});
  for (const auto& l : free_b) result_axes.push_back({l, pb.Extent(l)});
  LabeledTensor result(result_axes);

  for (size_t bi = 0; bi < nb; ++bi) {
    Eigen::Map<const RowMatrix> ma(pa.data().data() + bi * m * k, m, k);
    Eigen::Map<const RowMatrix> mb(pb.data().data() + bi * k * n, k, n);
    Eigen::Map<RowMatrix> mc(result.mutable_data().data() + bi * m * n, m, n);
    mc.noalias() = ma * mb;
  }
  if (result.Labels() == output_axes) return result;
  return result.Permuted(output_axes);
}

LabeledTensor ReshapeFold(const LabeledTensor& t,
                          const std::vector<Fold>& folds) {
  std::vector<Axis> axes = t.axes();
  for (const auto& fold : folds) {
    if (fold.old_labels.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty fold request");
    }
    auto first = std::find_if(axes.begin(), axes.end(), [&](const Axis& a) {
      return a.label == fold.old_labels[0];
    });
    if (first == axes.end()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "fold names missing axis '" + fold.old_labels[0] + "'");
    }
    const size_t start = first - axes.begin();
    size_t extent = 1;
    for (size_t i = 0; i < fold.old_labels.size(); ++i) {
      if (start + i >= axes.size() ||
          axes[start + i].label != fold.old_labels[i]) {
        throw Error(ErrorCode::kInvalidArgument,
                    "fold of non-contiguous axes into '" + fold.new_label +
                        "'");
      }
      extent *= axes[start + i].extent;
    }
    axes.erase(axes.begin() + start,
               axes.begin() + start + fold.old_labels.size());
    axes.insert(axes.begin() + start, Axis{fold.new_label, extent});
  }
  return LabeledTensor(std::move(axes), t.data());
}

LabeledTensor ReshapeUnfold(const LabeledTensor& t, std::string_view label,
                            const std::vector<Axis>& new_axes) {
  const size_t idx = t.AxisIndex(label);
  if (ProductOfExtents(new_axes) != t.axes()[idx].extent) {
    throw Error(ErrorCode::kShapeMismatch,
                "unfold of '" + std::string(label) + "' into " +
                    Describe(new_axes) + " changes its extent");
  }
  std::vector<Axis> axes = t.axes();
  axes.erase(axes.begin() + idx);
  axes.insert(axes.begin() + idx, new_axes.begin(), new_axes.end());
  return LabeledTensor(std::move(axes), t.data());
}

LabeledTensor Elementwise(const LabeledTensor& t, const LabeledTensor& u,
                          ElementwiseOp op) {
  if (t.axes() != u.axes()) {
    throw Error(ErrorCode::kShapeMismatch,
                "elementwise operands have different axes: " +
                    Describe(t.axes()) + " vs " + Describe(u.axes()));
  }
  std::vector<double> out(t.size());
  const auto& x = t.data();
  const auto& y = u.data();
  switch (op) {
    case ElementwiseOp::kAdd:
      for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
      break;
    case ElementwiseOp::kSub:
      for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
      break;
    case ElementwiseOp::kMul:
      for (size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
      break;
  }
  return LabeledTensor(t.axes(), std::move(out));
}

LabeledTensor Scale(const LabeledTensor& t, double factor) {
  std::vector<double> out(t.data());
  for (double& v : out) v *= factor;
  return LabeledTensor(t.axes(), std::move(out));
}

double MaxAbsDifference(const LabeledTensor& t, const LabeledTensor& u) {
  return Elementwise(t, u, ElementwiseOp::kSub).MaxAbs();
}

}  // namespace jpegspace
