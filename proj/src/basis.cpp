// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/basis.hpp"

#include <algorithm>
#include <cmath>

namespace rkmf::basis {

namespace {

constexpr Real kBreakdownFactor = 1e-14;

void check_start(const sparse::SparseMatrix& A, const Vector& b, Index m) {
  sparse::validate(A);
  if (A.n_rows != A.n_cols)
    throw ShapeError("arnoldi: matrix must be square");
  if (b.size() != A.n_rows)
    throw ShapeError("arnoldi: start vector length mismatch");
  if (m < 1) throw ParameterError("arnoldi: m must be >= 1");
  if (m > A.n_rows)
    throw ParameterError("arnoldi: m exceeds matrix dimension");
}

void shrink_on_breakdown(KrylovDecomposition& dec, Index kept) {
  dec.W.conservativeResize(Eigen::NoChange, kept);
  if (dec.U.size() > 0) dec.U.conservativeResize(Eigen::NoChange, kept);
  Matrix square = dec.Rbar.topLeftCorner(kept, kept);
  dec.Rbar = std::move(square);
  dec.breakdown_at = kept;
}

// Shared MGS loop; k_trunc >= m gives the fully orthogonal variant.
KrylovDecomposition arnoldi_impl(const sparse::SparseMatrix& A,
                                 const Vector& b, Index m, Index k_trunc,
                                 BasisKind kind) {
  check_start(A, b, m);
  if (k_trunc < 1) throw ParameterError("arnoldi: k_trunc must be >= 1");
  const Index n = A.n_rows;
  const Real beta = b.norm();
  if (beta == 0.0) throw ParameterError("arnoldi: zero start vector");

  KrylovDecomposition dec;
  dec.kind = kind;
  dec.k_trunc = (kind == BasisKind::Incomplete) ? k_trunc : 0;
  dec.start_norm = beta;
  dec.W.resize(n, m + 1);
  dec.Rbar = Matrix::Zero(m + 1, m);
  dec.W.col(0) = b / beta;
  dec.counters.note_basis_cols(1);

  const Real tol = kBreakdownFactor * sparse::norm1(A);
  const bool full = k_trunc >= m;
  for (Index k = 0; k < m; ++k) {
    Vector w = sparse::spmv(A, dec.W.col(k), &dec.counters);
    const Index lo = full ? 0 : std::max<Index>(0, k + 1 - k_trunc);
    for (Index i = lo; i <= k; ++i) {
      const Real h = dec.W.col(i).dot(w);
      ++dec.counters.dot_n;
      w -= h * dec.W.col(i);
      dec.Rbar(i, k) = h;
    }
    const Real hnext = w.norm();
    // At k+1 = n the Krylov space has saturated for the fully orthogonal
    // sweep; the incomplete variant can keep producing (non-orthogonal)
    // vectors, so it only stops on a genuinely tiny residual.
    if (hnext <= tol || (full && k + 1 == n)) {
      shrink_on_breakdown(dec, k + 1);
      return dec;
    }
    dec.Rbar(k + 1, k) = hnext;
    dec.W.col(k + 1) = w / hnext;
    ++dec.counters.basis_updates;
    dec.counters.note_basis_cols(k + 2);
  }
  return dec;
}

}  // namespace

KrylovDecomposition arnoldi(const sparse::SparseMatrix& A, const Vector& b,
                            Index m) {
  return arnoldi_impl(A, b, m, m, BasisKind::Orthonormal);
}

KrylovDecomposition incomplete_arnoldi(const sparse::SparseMatrix& A,
                                       const Vector& b, Index m,
                                       Index k_trunc) {
  return arnoldi_impl(A, b, m, k_trunc, BasisKind::Incomplete);
}

KrylovDecomposition randomized_arnoldi(const sparse::SparseMatrix& A,
                                       const sketch::SketchOperator& S,
                                       const Vector& b, Index m) {
  check_start(A, b, m);
  const Index n = A.n_rows;
  if (S.n != n) throw ShapeError("randomized_arnoldi: sketch width mismatch");
  const Index need = (m == n) ? m : m + 1;
  if (S.d < need)
    throw ParameterError(
        "randomized_arnoldi: sketch dimension d too small for m");

  const Vector sb = sketch::sketch_apply(S, b);
  const Real alpha = sb.norm();
  if (alpha == 0.0)
    throw ParameterError("randomized_arnoldi: zero start vector after sketching");

  KrylovDecomposition dec;
  dec.kind = BasisKind::SketchedOrthonormal;
  dec.start_norm = alpha;
  dec.W.resize(n, m + 1);
  dec.U.resize(S.d, m + 1);
  dec.Rbar = Matrix::Zero(m + 1, m);
  dec.W.col(0) = b / alpha;
  dec.U.col(0) = sb / alpha;
  dec.counters.note_basis_cols(1);

  const Real tol = kBreakdownFactor * sparse::norm1(A);
  for (Index k = 0; k < m; ++k) {
    const Vector z = sparse::spmv(A, dec.W.col(k), &dec.counters);
    Vector p = sketch::sketch_apply(S, z);
    // Modified Gram-Schmidt sweep in the sketch space.
    Vector r(k + 1);
    for (Index i = 0; i <= k; ++i) {
      r(i) = dec.U.col(i).dot(p);
      p -= r(i) * dec.U.col(i);
    }
    dec.counters.dot_d += k + 1;
    dec.Rbar.col(k).head(k + 1) = r;
    const Real rkk = p.norm();
    if (rkk <= tol || k + 1 == n) {
      shrink_on_breakdown(dec, k + 1);
      return dec;
    }
    dec.W.col(k + 1) = (z - dec.W.leftCols(k + 1) * r) / rkk;
    ++dec.counters.basis_updates;
    dec.U.col(k + 1) = p / rkk;
    dec.Rbar(k + 1, k) = rkk;
    dec.counters.note_basis_cols(k + 2);
  }
  return dec;
}

KrylovDecomposition truncated(const KrylovDecomposition& dec, Index m_hat) {
  if (m_hat < 1 || m_hat > dec.m())
    throw ParameterError("truncated: m_hat out of range");
  if (m_hat == dec.m()) return dec;

  KrylovDecomposition out;
  out.kind = dec.kind;
  out.k_trunc = dec.k_trunc;
  out.start_norm = dec.start_norm;
  out.W = dec.W.leftCols(m_hat + 1);
  if (dec.U.size() > 0) out.U = dec.U.leftCols(m_hat + 1);
  out.Rbar = dec.Rbar.topLeftCorner(m_hat + 1, m_hat);
  out.counters.matvecs = m_hat;
  out.counters.basis_updates = m_hat;
  out.counters.note_basis_cols(m_hat + 1);
  const bool full = dec.kind != BasisKind::Incomplete;
  for (Index k = 0; k < m_hat; ++k) {
    const Index width =
        full ? k + 1 : std::min<Index>(k + 1, dec.k_trunc);
    if (dec.kind == BasisKind::SketchedOrthonormal)
      out.counters.dot_d += k + 1;
    else
      out.counters.dot_n += width;
  }
  return out;
}

}  // namespace rkmf::basis
