// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_BASIS_HPP
#define RKMF_BASIS_HPP

#include <optional>

#include "rkmf/sketch.hpp"
#include "rkmf/sparse.hpp"
#include "rkmf/types.hpp"

namespace rkmf::basis {

enum class BasisKind { Orthonormal, SketchedOrthonormal, Incomplete };

// One Arnoldi(-like) decomposition A W_m = W_{m+1} Rbar_m.
//   W          n x (m+1) basis (n x m when the builder hit a happy breakdown)
//   Rbar       (m+1) x m upper Hessenberg (m x m square on breakdown)
//   start_norm beta = ||b|| (orthonormal/incomplete) or alpha = ||S b||
//   U          d x cols(W) sketched basis S*W (sketched-orthonormal kind)
//   breakdown_at  1-based step at which the Krylov space saturated
struct KrylovDecomposition {
  Matrix W;
  Matrix Rbar;
  Real start_norm = 0.0;
  BasisKind kind = BasisKind::Orthonormal;
  Index k_trunc = 0;  // orthogonalization window, Incomplete kind
  Matrix U;
  std::optional<Index> breakdown_at;
  PerfCounters counters;

  Index n() const { return W.rows(); }
  Index m() const { return Rbar.cols(); }
  bool has_next_vector() const { return W.cols() == m() + 1; }
  // Square compression R_m (top m x m of Rbar).
  Matrix Rm() const { return Rbar.topRows(m()); }
  // Subdiagonal coupling r_{m+1,m}; 0 after breakdown.
  Real subdiag() const {
    return has_next_vector() ? Rbar(m(), m() - 1) : 0.0;
  }
};

// Classical Arnoldi, single modified-Gram-Schmidt sweep. Requires
// ||b|| > 0 and 1 <= m <= n; at m = n the (n+1)-th vector cannot exist and
// a happy breakdown is declared at step n.
KrylovDecomposition arnoldi(const sparse::SparseMatrix& A, const Vector& b,
                            Index m);

// Arnoldi with the orthogonalization window limited to the previous
// k_trunc vectors. k_trunc >= m reproduces arnoldi() bit for bit.
KrylovDecomposition incomplete_arnoldi(const sparse::SparseMatrix& A,
                                       const Vector& b, Index m,
                                       Index k_trunc);

// Randomized Gram-Schmidt Arnoldi: orthogonalizes the sketches
// p = S(A w_k) against u_1..u_k, then forms w_{k+1} from the same
// coefficients. Requires d >= m+1 (d >= m when m = n).
KrylovDecomposition randomized_arnoldi(const sparse::SparseMatrix& A,
                                       const sketch::SketchOperator& S,
                                       const Vector& b, Index m);

// Leading m_hat-step prefix of a decomposition (all three builders nest).
// Counters are restated for the prefix cost.
KrylovDecomposition truncated(const KrylovDecomposition& dec, Index m_hat);

}  // namespace rkmf::basis

#endif  // RKMF_BASIS_HPP
