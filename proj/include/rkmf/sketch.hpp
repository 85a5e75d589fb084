// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_SKETCH_HPP
#define RKMF_SKETCH_HPP

#include <cstdint>
#include <vector>

#include "rkmf/types.hpp"

namespace rkmf::sketch {

// Sparse-sign subspace embedding S in R^{d x n}: every column holds zeta
// distinct rows with Rademacher signs, scaled so that E[S^T S] = I.
// Column j's coordinates live in rows[j*zeta .. (j+1)*zeta), sorted.
struct SketchOperator {
  Index d = 0;
  Index n = 0;
  Index zeta = 0;
  std::uint64_t seed = 0;
  std::vector<Index> rows;         // n*zeta row coordinates
  std::vector<signed char> signs;  // n*zeta entries in {-1,+1}
  Real scale = 1.0;                // 1/sqrt(zeta) from make_sketch
};

// Draws the operator from SplitMix64 streams derived per column, so the
// structure depends only on (d, n, zeta, seed). Requires 1 <= zeta <= d <= n.
SketchOperator make_sketch(Index d, Index n, Index zeta, std::uint64_t seed);

// y = S*x by scatter-add, O(zeta*n).
Vector sketch_apply(const SketchOperator& S, const Vector& x);

// Column-by-column application, S*B.
Matrix sketch_apply(const SketchOperator& S, const Matrix& B);

// Max measured distortion |  ||Sx||^2 / ||x||^2 - 1 | over probe vectors in
// span(basis). The probe set is `trials` random unit combinations plus the
// extremal right singular directions of S*basis, so the returned value is the
// true subspace distortion up to roundoff. `basis` must have orthonormal
// columns (checked to 1e-8).
Real estimate_distortion(const SketchOperator& S, const Matrix& basis,
                         Index trials);

}  // namespace rkmf::sketch

#endif  // RKMF_SKETCH_HPP
