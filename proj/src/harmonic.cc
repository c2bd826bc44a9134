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

#include "jpegspace/harmonic.h"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

std::unique_ptr<DctBasis> BuildBasis(size_t n) {
  auto basis = std::make_unique<DctBasis>();
  basis->n = n;
  LabeledTensor matrix({{"a", n}, {"m", n}});
  const double pi = std::numbers::pi;
  for (size_t a = 0; a < n; ++a) {
    const double scale =
        std::sqrt(2.0 / static_cast<double>(n)) * (a == 0 ? M_SQRT1_2 : 1.0);
    for (size_t m = 0; m < n; ++m) {
      matrix.at(a, m) =
          scale * std::cos((2.0 * m + 1.0) * a * pi / (2.0 * n));
    }
  }
  LabeledTensor forward({{"m", n}, {"n", n}, {"a", n}, {"b", n}});
  auto& f = forward.mutable_data();
  const auto& d = matrix.data();
  for (size_t m = 0; m < n; ++m) {
    for (size_t nn = 0; nn < n; ++nn) {
      for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
          f[((m * n + nn) * n + a) * n + b] = d[a * n + m] * d[b * n + nn];
        }
      }
    }
  }
  basis->inverse = forward.Permuted({"a", "b", "m", "n"});
  basis->forward = std::move(forward);
  basis->matrix = std::move(matrix);
  return basis;
}

void CheckSquareBlock(const LabeledTensor& t, const char* row,
                      const char* col) {
  if (t.rank() != 2 || !t.HasAxis(row) || !t.HasAxis(col) ||
      t.Extent(row) != t.Extent(col)) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("expected a square [") + row + "," + col +
                    "] block");
  }
}

}  // namespace

const DctBasis& GetDctBasis(size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "DCT size must be >= 1");
  static std::mutex mutex;
  static std::map<size_t, std::unique_ptr<DctBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = BuildBasis(n);
  return *slot;
}

LabeledTensor Dct2Forward(const LabeledTensor& block) {
  CheckSquareBlock(block, "m", "n");
  return Contract(GetDctBasis(block.Extent("m")).forward, block, {"a", "b"});
}

LabeledTensor Dct2Inverse(const LabeledTensor& coefficients) {
  CheckSquareBlock(coefficients, "a", "b");
  return Contract(GetDctBasis(coefficients.Extent("a")).inverse, coefficients,
                  {"m", "n"});
}

std::vector<double> Dct1Forward(std::span<const double> samples) {
  const size_t n = samples.size();
  const auto& d = GetDctBasis(n).matrix.data();
  std::vector<double> out(n, 0.0);
  for (size_t a = 0; a < n; ++a) {
    for (size_t m = 0; m < n; ++m) out[a] += d[a * n + m] * samples[m];
  }
  return out;
}

std::vector<double> Dct1Inverse(std::span<const double> coefficients) {
  const size_t n = coefficients.size();
  const auto& d = GetDctBasis(n).matrix.data();
  std::vector<double> out(n, 0.0);
  for (size_t m = 0; m < n; ++m) {
    for (size_t a = 0; a < n; ++a) out[m] += d[a * n + m] * coefficients[a];
  }
  return out;
}

LeastSquaresCheck DctLeastSquaresCheck(std::span<const double> samples,
                                       size_t m, size_t perturbations,
                                       uint64_t seed) {
  const size_t n = samples.size();
  if (m < 1 || m > n) {
    throw Error(ErrorCode::kOutOfRange,
                "least-squares order m=" + std::to_string(m) +
                    " outside [1, " + std::to_string(n) + "]");
  }
  const auto& d = GetDctBasis(n).matrix.data();
  const std::vector<double> y = Dct1Forward(samples);

  auto error_of = [&](const std::vector<double>& kept) {
    double e = 0.0;
    for (size_t t = 0; t < n; ++t) {
      double p = 0.0;
      for (size_t k = 0; k < m; ++k) p += kept[k] * d[k * n + t];
      e += (p - samples[t]) * (p - samples[t]);
    }
    return e;
  };

  LeastSquaresCheck result;
  const std::vector<double> kept(y.begin(), y.begin() + m);
  result.approx_error = error_of(kept);

  // Normal equations for min ||A c - x|| with A = first m basis vectors as
  // columns.
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd x(n);
  for (size_t t = 0; t < n; ++t) {
    x(t) = samples[t];
    for (size_t k = 0; k < m; ++k) a(t, k) = d[k * n + t];
  }
  const Eigen::VectorXd solution =
      (a.transpose() * a).ldlt().solve(a.transpose() * x);
  std::vector<double> normal(m);
  for (size_t k = 0; k < m; ++k) {
    normal[k] = solution(k);
    result.coefficient_gap =
        std::max(result.coefficient_gap, std::abs(normal[k] - kept[k]));
  }
  result.normal_equations_error = error_of(normal);

  double energy = 0.0;
  for (double v : samples) energy += v * v;
  const double sigma =
      0.05 * std::max(std::sqrt(energy / static_cast<double>(n)), 1e-6);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  result.best_perturbed_error = std::numeric_limits<double>::infinity();
  result.is_minimal = true;
  for (size_t trial = 0; trial < perturbations; ++trial) {
    std::vector<double> candidate = kept;
    for (double& c : candidate) c += noise(rng);
    const double e = error_of(candidate);
    result.best_perturbed_error = std::min(result.best_perturbed_error, e);
    if (e < result.approx_error) result.is_minimal = false;
  }
  return result;
}

LabeledTensor Hadamard(size_t n_power) {
  if (n_power > 20) {
    throw Error(ErrorCode::kOutOfRange, "Hadamard order too large");
  }
  const size_t size = size_t{1} << n_power;
  LabeledTensor h({{"i", size}, {"j", size}});
  auto& data = h.mutable_data();
  data[0] = 1.0;
  // Grow H_{k} into H_{k+1} in place: [[H, H], [H, -H]].
  for (size_t half = 1; half < size; half *= 2) {
    for (size_t i = 0; i < half; ++i) {
      for (size_t j = 0; j < half; ++j) {
        const double v = data[i * size + j];
        data[i * size + j + half] = v;
        data[(i + half) * size + j] = v;
        data[(i + half) * size + j + half] = -v;
      }
    }
  }
  return h;
}

HaarBands HaarDwt2(const LabeledTensor& image) {
  if (image.rank() != 2 || !image.HasAxis("h") || !image.HasAxis("w")) {
    throw Error(ErrorCode::kShapeMismatch, "Haar DWT expects an [h,w] image");
  }
  const LabeledTensor img = image.Permuted({"h", "w"});
  const size_t h = img.Extent("h");
  const size_t w = img.Extent("w");
  if (h % 2 != 0 || w % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "Haar DWT needs even dimensions, got " + std::to_string(h) +
                    "x" + std::to_string(w));
  }
  const std::vector<Axis> half = {{"h", h / 2}, {"w", w / 2}};
  HaarBands bands{LabeledTensor(half), LabeledTensor(half), LabeledTensor(half),
                  LabeledTensor(half)};
  for (size_t i = 0; i < h / 2; ++i) {
    for (size_t j = 0; j < w / 2; ++j) {
      const double a = img.at(2 * i, 2 * j);
      const double b = img.at(2 * i, 2 * j + 1);
      const double c = img.at(2 * i + 1, 2 * j);
      const double d = img.at(2 * i + 1, 2 * j + 1);
      bands.ll.at(i, j) = 0.5 * (a + b + c + d);
      bands.lh.at(i, j) = 0.5 * (a - b + c - d);
      bands.hl.at(i, j) = 0.5 * (a + b - c - d);
      bands.hh.at(i, j) = 0.5 * (a - b - c + d);
    }
  }
  return bands;
}

LabeledTensor HaarIdwt2(const HaarBands& bands) {
  const size_t h = bands.ll.Extent("h");
  const size_t w = bands.ll.Extent("w");
  for (const auto* band : {&bands.lh, &bands.hl, &bands.hh}) {
    if (band->axes() != bands.ll.axes()) {
      throw Error(ErrorCode::kShapeMismatch, "Haar bands differ in shape");
    }
  }
  LabeledTensor image({{"h", 2 * h}, {"w", 2 * w}});
  for (size_t i = 0; i < h; ++i) {
    for (size_t j = 0; j < w; ++j) {
      const double ll = bands.ll.at(i, j);
      const double lh = bands.lh.at(i, j);
      const double hl = bands.hl.at(i, j);
      const double hh = bands.hh.at(i, j);
      image.at(2 * i, 2 * j) = 0.5 * (ll + lh + hl + hh);
      image.at(2 * i, 2 * j + 1) = 0.5 * (ll - lh + hl - hh);
      image.at(2 * i + 1, 2 * j) = 0.5 * (ll + lh - hl - hh);
      image.at(2 * i + 1, 2 * j + 1) = 0.5 * (ll - lh - hl + hh);
    }
  }
  return image;
}

}  // namespace jpegspace
