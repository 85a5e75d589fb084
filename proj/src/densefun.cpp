// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/densefun.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace rkmf::densefun {

FunctionSpec FunctionSpec::exp_neg(Real t) {
  if (!(t >= 0.0)) throw ParameterError("FunctionSpec: t must be >= 0");
  FunctionSpec f;
  f.kind = Kind::ExpNeg;
  f.t = t;
  return f;
}

FunctionSpec FunctionSpec::phi1_neg(Real t) {
  if (!(t >= 0.0)) throw ParameterError("FunctionSpec: t must be >= 0");
  FunctionSpec f;
  f.kind = Kind::Phi1Neg;
  f.t = t;
  return f;
}

FunctionSpec FunctionSpec::cos_sqrt(Real nu, Real t) {
  if (!(t >= 0.0)) throw ParameterError("FunctionSpec: t must be >= 0");
  if (!(nu > 0.0)) throw ParameterError("FunctionSpec: nu must be > 0");
  FunctionSpec f;
  f.kind = Kind::CosSqrt;
  f.t = t;
  f.nu = nu;
  return f;
}

FunctionSpec FunctionSpec::scalar_table(std::string id,
                                        std::function<Complex(Complex)> fn) {
  if (!fn) throw ParameterError("FunctionSpec: empty scalar table callable");
  FunctionSpec f;
  f.kind = Kind::ScalarTable;
  f.table = std::move(fn);
  f.table_id = std::move(id);
  return f;
}

Complex phi1_scalar(Complex w) {
  if (std::abs(w) < 0.5) {
    // sum_{k>=0} w^k/(k+1)!  -- no cancellation near 0
    Complex term(1.0, 0.0), sum(1.0, 0.0);
    for (int k = 1; k < 24; ++k) {
      term *= w / static_cast<Real>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(w) - 1.0) / w;
}

Complex eval_scalar(const FunctionSpec& f, Complex z) {
  switch (f.kind) {
    case FunctionSpec::Kind::ExpNeg:
      return std::exp(-f.t * z);
    case FunctionSpec::Kind::Phi1Neg:
      return phi1_scalar(-f.t * z);
    case FunctionSpec::Kind::CosSqrt:
      return std::cos(f.nu * f.t * std::sqrt(z));
    case FunctionSpec::Kind::ScalarTable:
      if (!f.table) throw ParameterError("FunctionSpec: missing scalar table");
      return f.table(z);
  }
  throw ParameterError("FunctionSpec: unknown kind");
}

ThinQrResult thin_qr(const Matrix& B) {
  if (B.rows() < B.cols())
    throw ShapeError("shape: thin_qr expects rows >= cols");
  const Index m = B.cols();
  Eigen::HouseholderQR<Matrix> qr(B);
  ThinQrResult out;
  out.Q = qr.householderQ() * Matrix::Identity(B.rows(), m);
  out.T = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  for (Index i = 0; i < m; ++i) {
    if (out.T(i, i) < 0.0) {
      out.T.row(i) = -out.T.row(i);
      out.Q.col(i) = -out.Q.col(i);
    }
  }
  Real dmax = 0.0;
  for (Index i = 0; i < m; ++i) dmax = std::max(dmax, out.T(i, i));
  for (Index i = 0; i < m; ++i)
    if (out.T(i, i) <= 1e-12 * dmax) out.rank_deficient = true;
  return out;
}

namespace {

void require_square(const Matrix& X, const char* who) {
  if (X.rows() != X.cols())
    throw ShapeError(std::string("shape: ") + who + " expects a square matrix");
}

void require_finite_result(const Matrix& F, const char* who) {
  if (!F.allFinite())
    throw NumericalError(std::string(who) + ": function overflow");
}

constexpr Real kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& X) {
  require_square(X, "expm");
  if (!X.allFinite()) throw NumericalError("expm: non-finite input");
  const Index n = X.rows();
  if (n == 0) return Matrix(0, 0);

  const Real norm = X.cwiseAbs().colwise().sum().maxCoeff();
  if (norm == 0.0) return Matrix::Identity(n, n);
  int s = 0;
  if (norm > kTheta13) {
    s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    s = std::min(s, 64);
  }
  const Matrix A = X / std::ldexp(1.0, s);

  static const Real b[14] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A2 * A4;
  const Matrix U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
           b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                   b[4] * A4 + b[2] * A2 + b[0] * I;
  Matrix F = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) {
    F = F * F;
    if (!F.allFinite()) throw NumericalError("expm: function overflow");
  }
  require_finite_result(F, "expm");
  return F;
}

Matrix phi1m(const Matrix& X) {
  require_square(X, "phi1m");
  if (!X.allFinite()) throw NumericalError("phi1m: non-finite input");
  const Index n = X.rows();
  if (n == 0) return Matrix(0, 0);
  const Matrix I = Matrix::Identity(n, n);

  // Scale so the Taylor series of phi1 (all-positive coefficients, no
  // cancellation) converges in a few terms, then undo the scaling with
  // phi1(2Z) = (e^Z + I) phi1(Z) / 2 alongside e^Z = I + Z phi1(Z).
  const Real norm = X.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5)
    s = std::min(64, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
  const Matrix Z = X / std::ldexp(1.0, s);

  Matrix P = I;
  Matrix term = I;
  for (int k = 1; k <= 24; ++k) {
    term = (term * Z / Real(k + 1)).eval();  // Z^k / (k+1)!
    P += term;
    if (term.cwiseAbs().maxCoeff() <=
        std::numeric_limits<Real>::epsilon() * P.cwiseAbs().maxCoeff())
      break;
  }
  if (s > 0) {
    Matrix E = I + Z * P;
    for (int i = 0; i < s; ++i) {
      P = (0.5 * ((E + I) * P)).eval();
      if (!P.allFinite()) throw NumericalError("phi1m: function overflow");
      if (i + 1 < s) E = (E * E).eval();
    }
  }
  require_finite_result(P, "phi1m");
  return P;
}

namespace {

// cos(a sqrt(Y)) by its entire Taylor series in Y; converges fast once
// a^2*||Y||_1 <= 1. Works for real and complex scalars.
template <typename Mat>
Mat cos_sqrt_series(const Mat& Y, Real a) {
  const Index n = Y.rows();
  Mat term = Mat::Identity(n, n);
  Mat sum = term;
  const Real a2 = a * a;
  for (int k = 1; k <= 80; ++k) {
    term = (term * Y).eval();
    term *= -a2 / static_cast<Real>((2 * k - 1) * (2 * k));
    sum += term;
    if (term.cwiseAbs().maxCoeff() <=
        std::numeric_limits<Real>::epsilon() * sum.cwiseAbs().maxCoeff())
      break;
  }
  return sum;
}

// cos(a sqrt(T)) for one (clustered) triangular block: scale T by 4^{-s},
// run the series, then undo with the double angle C <- 2C^2 - I.
ComplexMatrix atomic_cos_sqrt(const ComplexMatrix& T, Real a) {
  const Index n = T.rows();
  const Real norm = T.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (a * a * norm / std::pow(4.0, s) > 1.0 && s < 64) ++s;
  ComplexMatrix C =
      cos_sqrt_series<ComplexMatrix>(T / std::pow(4.0, s), a);
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  for (int i = 0; i < s; ++i) C = (2.0 * (C * C) - I).eval();
  return C;
}

// Unitary similarity swapping the two diagonal entries of an upper-
// triangular 2x2 block at position k; applied to T (rows and columns) and
// accumulated into Q.
void swap_adjacent(ComplexMatrix& T, ComplexMatrix& Q, Index k) {
  const Complex l1 = T(k, k), l2 = T(k + 1, k + 1), t12 = T(k, k + 1);
  const Complex x1 = t12, x2 = l2 - l1;  // eigenvector of [[l1,t12],[0,l2]] for l2
  const Real r = std::sqrt(std::norm(x1) + std::norm(x2));
  if (r == 0.0) return;  // identical entries, nothing to move
  Eigen::Matrix2cd G;
  G << x1 / r, -std::conj(x2) / r, x2 / r, std::conj(x1) / r;
  T.middleCols(k, 2) = (T.middleCols(k, 2) * G).eval();
  T.middleRows(k, 2) = (G.adjoint() * T.middleRows(k, 2)).eval();
  Q.middleCols(k, 2) = (Q.middleCols(k, 2) * G).eval();
  T(k + 1, k) = Complex(0.0, 0.0);
}

struct SchurForm {
  ComplexMatrix T;
  ComplexMatrix Q;
};

SchurForm complex_schur(const Matrix& X) {
  const Index n = X.rows();
  bool hessenberg = true;
  for (Index j = 0; j + 2 < n && hessenberg; ++j)
    for (Index i = j + 2; i < n; ++i)
      if (X(i, j) != 0.0) {
        hessenberg = false;
        break;
      }
  Eigen::ComplexSchur<ComplexMatrix> schur;
  if (hessenberg)
    schur.computeFromHessenberg(X.cast<Complex>(),
                                ComplexMatrix::Identity(n, n), true);
  else
    schur.compute(X.cast<Complex>(), true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("schur iteration did not converge");
  return {schur.matrixT(), schur.matrixU()};
}

// Transitive-closure clustering of diagonal entries with threshold delta;
// returns contiguous block sizes after reordering T (and Q).
std::vector<Index> cluster_and_reorder(ComplexMatrix& T, ComplexMatrix& Q,
                                       Real delta) {
  const Index n = T.rows();
  std::vector<int> cl(static_cast<size_t>(n));
  std::iota(cl.begin(), cl.end(), 0);
  // union-find on eigenvalue proximity
  std::function<int(int)> find = [&](int i) {
    while (cl[static_cast<size_t>(i)] != i) {
      cl[static_cast<size_t>(i)] =
          cl[static_cast<size_t>(cl[static_cast<size_t>(i)])];
      i = cl[static_cast<size_t>(i)];
    }
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(T(i, i) - T(j, j)) <= delta) {
        const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) cl[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
      }
  std::vector<int> id(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) id[static_cast<size_t>(i)] = find(static_cast<int>(i));

  // Bubble members of each cluster (in order of first appearance) into place.
  std::vector<Index> blocks;
  Index pos = 0;
  while (pos < n) {
    const int cid = id[static_cast<size_t>(pos)];
    Index count = 0;
    for (Index j = pos; j < n; ++j) {
      if (id[static_cast<size_t>(j)] != cid) continue;
      for (Index k = j; k > pos + count; --k) {
        swap_adjacent(T, Q, k - 1);
        std::swap(id[static_cast<size_t>(k)], id[static_cast<size_t>(k - 1)]);
      }
      ++count;
    }
    blocks.push_back(count);
    pos += count;
  }
  return blocks;
}

// Blocked Parlett recurrence: diagonal blocks by `atomic`, off-diagonal
// blocks from the Sylvester equations of T F = F T.
ComplexMatrix parlett_block(const ComplexMatrix& T,
                            const std::vector<Index>& blocks,
                            const std::function<ComplexMatrix(
                                const ComplexMatrix&)>& atomic) {
  const Index n = T.rows();
  const Index nb = static_cast<Index>(blocks.size());
  std::vector<Index> start(static_cast<size_t>(nb) + 1, 0);
  for (Index b = 0; b < nb; ++b)
    start[static_cast<size_t>(b) + 1] =
        start[static_cast<size_t>(b)] + blocks[static_cast<size_t>(b)];

  ComplexMatrix F = ComplexMatrix::Zero(n, n);
  auto blk = [&](const ComplexMatrix& M, Index bi, Index bj) {
    return M.block(start[static_cast<size_t>(bi)], start[static_cast<size_t>(bj)],
                   blocks[static_cast<size_t>(bi)], blocks[static_cast<size_t>(bj)]);
  };
  for (Index b = 0; b < nb; ++b) {
    F.block(start[static_cast<size_t>(b)], start[static_cast<size_t>(b)],
            blocks[static_cast<size_t>(b)], blocks[static_cast<size_t>(b)]) =
        atomic(blk(T, b, b));
  }
  for (Index off = 1; off < nb; ++off) {
    for (Index i = 0; i + off < nb; ++i) {
      const Index j = i + off;
      ComplexMatrix C = blk(F, i, i) * blk(T, i, j) - blk(T, i, j) * blk(F, j, j);
      for (Index k = i + 1; k < j; ++k)
        C += blk(F, i, k) * blk(T, k, j) - blk(T, i, k) * blk(F, k, j);
      // Solve T_ii X - X T_jj = C column by column (both sides triangular).
      const ComplexMatrix Tii = blk(T, i, i);
      const ComplexMatrix Tjj = blk(T, j, j);
      const Index p = Tii.rows(), q = Tjj.rows();
      ComplexMatrix Xb(p, q);
      for (Index c = 0; c < q; ++c) {
        ComplexVector rhs = C.col(c);
        for (Index k = 0; k < c; ++k) rhs += Xb.col(k) * Tjj(k, c);
        ComplexMatrix M = Tii;
        M.diagonal().array() -= Tjj(c, c);
        Xb.col(c) = M.template triangularView<Eigen::Upper>().solve(rhs);
      }
      F.block(start[static_cast<size_t>(i)], start[static_cast<size_t>(j)], p, q) = Xb;
    }
  }
  return F;
}

}  // namespace

Matrix cosm_sqrt_taylor(const Matrix& X, Real a) {
  require_square(X, "cosm_sqrt");
  Matrix F = cos_sqrt_series<Matrix>(X, a);
  require_finite_result(F, "cosm_sqrt");
  return F;
}

Matrix cosm_sqrt_schur(const Matrix& X, Real a) {
  require_square(X, "cosm_sqrt");
  const Index n = X.rows();
  if (n == 0) return Matrix(0, 0);
  const Real norm = X.cwiseAbs().colwise().sum().maxCoeff();
  SchurForm s = complex_schur(X);
  const Real delta =
      0.1 * std::max(norm, 1.0) * std::sqrt(std::numeric_limits<Real>::epsilon());
  const std::vector<Index> blocks = cluster_and_reorder(s.T, s.Q, delta);
  const ComplexMatrix F = parlett_block(
      s.T, blocks,
      [a](const ComplexMatrix& T) { return atomic_cos_sqrt(T, a); });
  Matrix out = (s.Q * F * s.Q.adjoint()).real();
  require_finite_result(out, "cosm_sqrt");
  return out;
}

Matrix cosm_sqrt(const Matrix& X, Real a) {
  require_square(X, "cosm_sqrt");
  const Real norm = X.cwiseAbs().colwise().sum().maxCoeff();
  if (a * a * norm <= 1.0) return cosm_sqrt_taylor(X, a);
  return cosm_sqrt_schur(X, a);
}

namespace {

Matrix funm_scalar_table(const Matrix& X, const FunctionSpec& f) {
  const Index n = X.rows();
  if (n == 0) return Matrix(0, 0);
  SchurForm s = complex_schur(X);
  const ComplexMatrix& T = s.T;
  ComplexMatrix F = ComplexMatrix::Zero(n, n);
  Real lmax = 0.0;
  for (Index i = 0; i < n; ++i) lmax = std::max(lmax, std::abs(T(i, i)));
  const Real guard =
      100.0 * std::numeric_limits<Real>::epsilon() * std::max(lmax, 1.0);
  for (Index i = 0; i < n; ++i) F(i, i) = eval_scalar(f, T(i, i));
  for (Index off = 1; off < n; ++off) {
    for (Index i = 0; i + off < n; ++i) {
      const Index j = i + off;
      const Complex den = T(i, i) - T(j, j);
      if (std::abs(den) < guard)
        throw NumericalError(
            "scalar-table parlett: confluent eigenvalues (use a built-in "
            "kind or separate the spectrum)");
      Complex num = T(i, j) * (F(i, i) - F(j, j));
      for (Index k = i + 1; k < j; ++k)
        num += F(i, k) * T(k, j) - T(i, k) * F(k, j);
      F(i, j) = num / den;
    }
  }
  return (s.Q * F * s.Q.adjoint()).real();
}

}  // namespace

Matrix funm(const Matrix& X, const FunctionSpec& f) {
  require_square(X, "funm");
  Matrix F;
  switch (f.kind) {
    case FunctionSpec::Kind::ExpNeg:
      F = expm((-f.t * X).eval());
      break;
    case FunctionSpec::Kind::Phi1Neg:
      F = phi1m((-f.t * X).eval());
      break;
    case FunctionSpec::Kind::CosSqrt:
      F = cosm_sqrt(X, f.nu * f.t);
      break;
    case FunctionSpec::Kind::ScalarTable:
      F = funm_scalar_table(X, f);
      break;
    default:
      throw ParameterError("funm: unknown FunctionSpec kind");
  }
  require_finite_result(F, "funm");
  return F;
}

Vector dense_eig_oracle(const Matrix& X, const FunctionSpec& f,
                        const Vector& b) {
  require_square(X, "dense_eig_oracle");
  if (b.size() != X.rows())
    throw ShapeError("shape: dense_eig_oracle expects len(b) == rows(X)");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(X.cast<Complex>());
  if (es.info() != Eigen::Success)
    throw NumericalError("dense_eig_oracle: eigendecomposition failed");
  const ComplexMatrix& V = es.eigenvectors();
  Eigen::JacobiSVD<ComplexMatrix> svd(V);
  const Real smin = svd.singularValues().minCoeff();
  const Real cond = smin > 0.0
                        ? svd.singularValues().maxCoeff() / smin
                        : std::numeric_limits<Real>::infinity();
  if (cond > 1e12)
    throw NumericalError(
        "dense_eig_oracle: eigenvector condition > 1e12 (defective input)");
  if (cond > 1e8)
    std::fprintf(stderr,
                 "dense_eig_oracle: warning: eigenvector condition %.3g\n",
                 cond);
  ComplexVector c = V.partialPivLu().solve(b.cast<Complex>());
  for (Index i = 0; i < c.size(); ++i) c[i] *= eval_scalar(f, es.eigenvalues()[i]);
  return (V * c).real();
}

}  // namespace rkmf::densefun
