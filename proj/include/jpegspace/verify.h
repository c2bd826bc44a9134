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

// Self-checks comparing every coefficient-domain operator with its pixel
// counterpart on random data.

#ifndef JPEGSPACE_VERIFY_H_
#define JPEGSPACE_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace jpegspace {

struct VerifyOptions {
  uint64_t seed = 1;
  // Image edges for the linear-map checks; multiples of 8, at most 64.
  std::vector<size_t> sizes = {8, 16, 24, 32};
  size_t images = 100;
  size_t quality_matrices = 5;
  size_t conv_triples = 20;
  size_t conv_edge = 16;
  size_t theorem_blocks = 10000;
  // Adds 1e-3 to every entry of each exploded convolution before use.
  bool inject_fault = false;
};

struct CheckResult {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* Find(const std::string& name) const;
};

// Check names, in report order:
//   map_vs_procedure    J against ForwardBlocks + 1/q scaling
//   linear_round_trip   J~ J = identity
//   blockwise_maps      dense J, J~ against their blockwise evaluation
//   xi_equivalence      Xi J(I) against J(conv(I)), relative to |J(conv(I))|
//   xi_builders_agree   naive and fast Xi
//   gap_equivalence     GAP against the pixel mean
//   bn_statistics       coefficient mean / variance against pixel statistics
//   bn_equivalence      J~(BN(F)) against pixel BN, both modes
//   mean_variance       Var[X] = E[Y^2] for zero-mean blocks
//   least_squares       truncated DCT against the normal equations
//   asm_exact           ASM at m = 14 against the exact ReLU
//   psi_identity        masking with ones is the identity
VerifyReport RunVerify(const VerifyOptions& options);

}  // namespace jpegspace

#endif  // JPEGSPACE_VERIFY_H_
