// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_APPROXIMANTS_HPP
#define RKMF_APPROXIMANTS_HPP

#include <string>
#include <vector>

#include "rkmf/basis.hpp"
#include "rkmf/densefun.hpp"
#include "rkmf/sketch.hpp"
#include "rkmf/types.hpp"

namespace rkmf::approx {

struct Approximant {
  Vector value;
  std::string method;
  Index m = 0;
  struct Diagnostics {
    Real kappa_W = 0.0;            // 2-norm condition number of W_m
    std::vector<Complex> ritz;     // eigenvalues of the compression
    long long matvecs = 0;
  } diag;
};

// Full orthogonalization method f_m = beta W_m f(R_m) e_1 on an
// orthonormal basis; also evaluates the same projection formula on an
// incomplete basis (where R_m = W_m^T A W_m only within the window).
Approximant fom(const basis::KrylovDecomposition& dec,
                const densefun::FunctionSpec& f);

// Randomized Arnoldi approximant f_m = alpha W_m f(R_m) e_1; requires a
// sketched-orthonormal decomposition.
Approximant rand_fom(const basis::KrylovDecomposition& dec,
                     const densefun::FunctionSpec& f);

// Least-squares-corrected compression Y_m = R_m + r_{m+1,m} y e_m^T with
// y = argmin ||W_m y - w_{m+1}||, evaluated as eta W_m f(Y_m) e_1 where
// eta is the decomposition's start norm. use_precond selects the
// sketch-and-precondition LSMR path for y.
Approximant rand_ls(const basis::KrylovDecomposition& dec,
                    const sparse::SparseMatrix& A,
                    const sketch::SketchOperator& S,
                    const densefun::FunctionSpec& f, bool use_precond = true);

// Sketched FOM: whitens S W_{m+1} by thin QR and evaluates
// ||S b|| W_m T_m^{-1} f(X_m) e_1 with
// X_m = T_m R_m T_m^{-1} + (r_{m+1,m}/t_m) t e_m^T.
Approximant sfom(const basis::KrylovDecomposition& dec,
                 const sketch::SketchOperator& S, const Vector& b,
                 const densefun::FunctionSpec& f);

// Eigenvalues of the square compression R_m, sorted by (re, im).
std::vector<Complex> ritz_values(const basis::KrylovDecomposition& dec);

// 2-norm condition number of the basis columns W_m (thin SVD).
Real basis_condition(const basis::KrylovDecomposition& dec);

}  // namespace rkmf::approx

#endif  // RKMF_APPROXIMANTS_HPP
