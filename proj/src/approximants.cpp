// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/approximants.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

#include "rkmf/leastsq.hpp"

namespace rkmf::approx {

namespace {

Approximant finish(const basis::KrylovDecomposition& dec, std::string method,
                   Vector value) {
  Approximant out;
  out.value = std::move(value);
  out.method = std::move(method);
  out.m = dec.m();
  out.diag.kappa_W = basis_condition(dec);
  out.diag.ritz = ritz_values(dec);
  out.diag.matvecs = dec.counters.matvecs;
  return out;
}

}  // namespace

std::vector<Complex> ritz_values(const basis::KrylovDecomposition& dec) {
  const Eigen::EigenSolver<Matrix> es(dec.Rm(), /*computeEigenvectors=*/false);
  std::vector<Complex> ritz(es.eigenvalues().data(),
                            es.eigenvalues().data() + dec.m());
  std::sort(ritz.begin(), ritz.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ritz;
}

Real basis_condition(const basis::KrylovDecomposition& dec) {
  const Matrix Wm = dec.W.leftCols(dec.m());
  const Eigen::BDCSVD<Matrix> svd(Wm);
  const auto& sv = svd.singularValues();
  const Real smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<Real>::infinity();
  return sv(0) / smin;
}

Approximant fom(const basis::KrylovDecomposition& dec,
                const densefun::FunctionSpec& f) {
  if (dec.kind == basis::BasisKind::SketchedOrthonormal)
    throw ParameterError("fom: expects an orthonormal or incomplete basis");
  const Index m = dec.m();
  const Matrix F = densefun::funm(dec.Rm(), f);
  Vector value = dec.start_norm * (dec.W.leftCols(m) * F.col(0));
  return finish(dec,
                dec.kind == basis::BasisKind::Incomplete ? "incomplete"
                                                         : "arnoldi",
                std::move(value));
}

Approximant rand_fom(const basis::KrylovDecomposition& dec,
                     const densefun::FunctionSpec& f) {
  if (dec.kind != basis::BasisKind::SketchedOrthonormal)
    throw ParameterError("rand_fom: expects a sketched-orthonormal basis");
  const Index m = dec.m();
  const Matrix F = densefun::funm(dec.Rm(), f);
  Vector value = dec.start_norm * (dec.W.leftCols(m) * F.col(0));
  return finish(dec, "rand", std::move(value));
}

Approximant rand_ls(const basis::KrylovDecomposition& dec,
                    const sparse::SparseMatrix& A,
                    const sketch::SketchOperator& S,
                    const densefun::FunctionSpec& f, bool use_precond) {
  if (dec.kind == basis::BasisKind::Orthonormal)
    throw ParameterError(
        "rand_ls: expects a sketched-orthonormal or incomplete basis");
  if (A.n_rows != dec.n())
    throw ShapeError("rand_ls: matrix/basis dimension mismatch");
  if (S.n != dec.n()) throw ShapeError("rand_ls: sketch width mismatch");

  const Index m = dec.m();
  Matrix Y = dec.Rm();
  if (dec.has_next_vector()) {
    const Matrix Wm = dec.W.leftCols(m);
    const Vector w_next = dec.W.col(m);
    Vector y;
    if (use_precond) {
      y = leastsq::sketch_precondition_lsq(Wm, w_next, S).solution;
    } else {
      y = leastsq::lsmr(Wm, w_next).solution;
    }
    Y.col(m - 1) += dec.subdiag() * y;
  }
  const Matrix F = densefun::funm(Y, f);
  Vector value = dec.start_norm * (dec.W.leftCols(m) * F.col(0));
  return finish(dec, "rand-ls", std::move(value));
}

Approximant sfom(const basis::KrylovDecomposition& dec,
                 const sketch::SketchOperator& S, const Vector& b,
                 const densefun::FunctionSpec& f) {
  if (S.n != dec.n()) throw ShapeError("sfom: sketch width mismatch");
  if (b.size() != dec.n()) throw ShapeError("sfom: start vector mismatch");
  const Index m = dec.m();

  const Vector sb = sketch::sketch_apply(S, b);
  const Real sb_norm = sb.norm();
  if (sb_norm == 0.0)
    throw ParameterError("sfom: sketched start vector is zero");

  // Whiten the sketched basis (reuse U = S W when the builder kept it).
  const Matrix SW = (dec.U.size() > 0)
                        ? dec.U
                        : Matrix(sketch::sketch_apply(S, dec.W));
  const auto qr = densefun::thin_qr(SW);
  const Real dmax = qr.T.diagonal().cwiseAbs().maxCoeff();
  if (qr.T.diagonal().cwiseAbs().minCoeff() <= 1e-14 * dmax)
    throw NumericalError("sfom: whitening breakdown");

  const Matrix Tm = qr.T.topLeftCorner(m, m);
  const auto Tview = Tm.triangularView<Eigen::Upper>();
  // X = T_m R_m T_m^{-1} via a right triangular solve.
  Matrix X = Tm * dec.Rm();
  Tview.transpose().solveInPlace(X.transpose());
  if (dec.has_next_vector()) {
    const Vector t = qr.T.col(m).head(m);
    X.col(m - 1) += (dec.subdiag() / Tm(m - 1, m - 1)) * t;
  }
  const Matrix F = densefun::funm(X, f);
  const Vector coeff = Tview.solve(F.col(0));
  Vector value = sb_norm * (dec.W.leftCols(m) * coeff);
  Approximant out = finish(dec, "sfom", std::move(value));
  return out;
}

}  // namespace rkmf::approx
