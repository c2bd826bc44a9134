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

// Block transforms: orthonormal DCT-II/DCT-III, Hadamard, one-level Haar.

#ifndef JPEGSPACE_HARMONIC_H_
#define JPEGSPACE_HARMONIC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jpegspace/tensor.h"

namespace jpegspace {

// Orthonormal DCT basis for n-point blocks.
//
//   matrix   [a, m]          D(a, m) = sqrt(2/n) C(a) cos((2m+1) a pi / 2n)
//   forward  [m, n, a, b]    D(a, m) D(b, n)   (pixels -> frequencies)
//   inverse  [a, b, m, n]    transpose of forward
//
// with C(0) = 1/sqrt(2) and C(u) = 1 otherwise. For n = 8 this is exactly
// the JPEG 1/4 C(i) C(j) normalisation.
struct DctBasis {
  size_t n = 0;
  LabeledTensor matrix;
  LabeledTensor forward;
  LabeledTensor inverse;
};

// Built once per size and shared; safe to call from any thread.
const DctBasis& GetDctBasis(size_t n);

// block[m, n] -> coefficients[a, b]; the block must be square with extent
// equal to the basis size.
LabeledTensor Dct2Forward(const LabeledTensor& block);
// coefficients[a, b] -> block[m, n].
LabeledTensor Dct2Inverse(const LabeledTensor& coefficients);

// 1D orthonormal DCT-II / DCT-III of a signal of any length.
std::vector<double> Dct1Forward(std::span<const double> samples);
std::vector<double> Dct1Inverse(std::span<const double> coefficients);

struct LeastSquaresCheck {
  // e_m = sum_t (p_m(t) - x_t)^2 with p_m built from the first m
  // coefficients.
  double approx_error = 0.0;
  // Error of the exact least-squares fit over the same m basis vectors,
  // obtained by solving the normal equations.
  double normal_equations_error = 0.0;
  // max |y_k - y*_k| between the kept DCT coefficients and the normal
  // equations solution.
  double coefficient_gap = 0.0;
  // Smallest error among the random perturbations of the kept coefficients.
  double best_perturbed_error = 0.0;
  // approx_error <= every perturbed error.
  bool is_minimal = false;
};

// Checks that truncating the DCT to its first m coefficients is the
// least-squares approximation of `samples` among signals spanned by the
// first m basis vectors. 1 <= m <= samples.size().
LeastSquaresCheck DctLeastSquaresCheck(std::span<const double> samples,
                                       size_t m, size_t perturbations = 1000,
                                       uint64_t seed = 1);

// Sylvester-Hadamard matrix H_k of size 2^k x 2^k, axes [i, j].
LabeledTensor Hadamard(size_t n_power);

struct HaarBands {
  LabeledTensor ll, lh, hl, hh;
};

// One level of the orthonormal 2D Haar DWT of image[h, w] (both extents
// even). Bands have axes [h, w] at half resolution. For a 2x2 block
// [[a, b], [c, d]]:
//   LL = (a+b+c+d)/2  LH = (a-b+c-d)/2  HL = (a+b-c-d)/2  HH = (a-b-c+d)/2
HaarBands HaarDwt2(const LabeledTensor& image);
LabeledTensor HaarIdwt2(const HaarBands& bands);

}  // namespace jpegspace

#endif  // JPEGSPACE_HARMONIC_H_
